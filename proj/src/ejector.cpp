#include "fdr/ejector.hpp"

#include <algorithm>
#include <cmath>

namespace fdr {

namespace {
constexpr double kAtmosphere = 101325.0;  // Pa
}

double jet_velocity(double q_in, const DeviceGeometry& g) {
    return (q_in / g.n_nozzles) / g.a_ne;
}

double jet_dynamic_pressure(double q_in, const DeviceGeometry& g, const FluidProperties& fluid) {
    const double v = jet_velocity(q_in, g);
    return 0.5 * fluid.rho * v * v;
}

double speed_of_sound(const FluidProperties& fluid) {
    return std::sqrt(fluid.gamma * kAtmosphere / fluid.rho);
}

bool jet_is_supersonic(double q_in, const DeviceGeometry& g, const FluidProperties& fluid) {
    return jet_velocity(q_in, g) > speed_of_sound(fluid);
}

double recirculation_penalty(double w, double w_ref, const ModelCoefficients& coeffs) {
    const double excess = std::max(0.0, (w - w_ref) / w_ref);
    return 1.0 / (1.0 + coeffs.c_recirc * excess * excess);
}

OutputPressureTerms output_pressure_terms(double q_in, const GateState& gate, const DeviceGeometry& g,
                                          const FluidProperties& fluid, const ModelCoefficients& coeffs) {
    const double s = gate.open_fraction;
    const double v_back = (1.0 - s) * q_in / (coeffs.cd_out * g.a_out);

    OutputPressureTerms t;
    t.p_blow = 0.5 * fluid.rho * v_back * v_back;
    t.p_suck = coeffs.eta * jet_dynamic_pressure(q_in, g, fluid) * std::min(1.0, gate.a_fg / g.a_ex) *
               recirculation_penalty(g.gate.w, g.channel_width_ref, coeffs);
    t.p_out = (1.0 - s) * t.p_blow - s * t.p_suck;
    return t;
}

double output_pressure(double q_in, const GateState& gate, const DeviceGeometry& g, const FluidProperties& fluid,
                       const ModelCoefficients& coeffs) {
    return output_pressure_terms(q_in, gate, g, fluid, coeffs).p_out;
}

}  // namespace fdr
