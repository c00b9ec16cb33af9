#pragma once

#include "fdr/core.hpp"
#include "fdr/gate.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

// Sign convention for the output port: positive gauge pressure is blowing,
// negative is suction.

/// Mean nozzle-exit velocity, (q_in / n_nozzles) / a_ne (m/s).
double jet_velocity(double q_in, const DeviceGeometry& g);

/// Dynamic pressure of the nozzle jet, (rho/2) v^2 (Pa).
double jet_dynamic_pressure(double q_in, const DeviceGeometry& g, const FluidProperties& fluid);

/// Speed of sound of the working air at atmospheric pressure.
double speed_of_sound(const FluidProperties& fluid);

/// True when the algebraic jet velocity exceeds the speed of sound. The
/// model stays algebraic; callers surface this as a warning.
bool jet_is_supersonic(double q_in, const DeviceGeometry& g, const FluidProperties& fluid);

/// 1 / (1 + c_recirc max(0, (w - w_ref)/w_ref)^2): suction retained when the
/// jet recirculates in a channel wider than the reference width.
double recirculation_penalty(double w, double w_ref, const ModelCoefficients& coeffs);

struct OutputPressureTerms {
    double p_blow = 0.0;  // reversed-flow stagnation pressure, Pa
    double p_suck = 0.0;  // entrainment suction magnitude, Pa
    double p_out = 0.0;   // (1 - s) p_blow - s p_suck
};

OutputPressureTerms output_pressure_terms(double q_in, const GateState& gate, const DeviceGeometry& g,
                                          const FluidProperties& fluid, const ModelCoefficients& coeffs);

/// Output-port gauge pressure blended by the gate open fraction s.
double output_pressure(double q_in, const GateState& gate, const DeviceGeometry& g, const FluidProperties& fluid,
                       const ModelCoefficients& coeffs);

}  // namespace fdr
