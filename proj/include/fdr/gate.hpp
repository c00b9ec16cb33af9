#pragma once

#include "fdr/core.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

/// Linear compliance of the flap gate: opening area grows linearly with
/// chamber pressure above a crack pressure, up to a saturation area.
struct GateComplianceModel {
    double compliance_scale = 1.9e-10;  // k0, m^2/Pa for the reference stiffness
    double crack_pressure = 8000.0;     // p_c, Pa
    double a_fg_max = 16e-6;            // m^2
};

struct GateState {
    double a_fg = 0.0;           // m^2
    double open_fraction = 0.0;  // a_fg / a_fg_max
};

/// Flexural-rigidity proxy of a cantilevered gate wall, E t^3 h / w (N m).
double gate_stiffness(const FlapGateGeometry& geom, const Material& mat);

/// Stiffness proxy of the nominal (Type B) gate.
double reference_stiffness();

/// Compliance model for a device: k0 and p_c from the coefficients,
/// saturation at the gate channel cross-section w * channel height.
GateComplianceModel compliance_model(const DeviceGeometry& g, const ModelCoefficients& coeffs);

/// a_fg = min(a_fg_max, k0 (D_ref / D) max(0, p - p_c)).
GateState opening_area(double p, const GateComplianceModel& model, const FlapGateGeometry& geom,
                       const Material& mat);

inline double opening_ratio(double a_fg, double a_ex) { return a_fg / a_ex; }

}  // namespace fdr
