#include "fdr/gate.hpp"

#include <algorithm>
#include <cmath>

namespace fdr {

double gate_stiffness(const FlapGateGeometry& geom, const Material& mat) {
    return mat.youngs_modulus * geom.t * geom.t * geom.t * geom.h / geom.w;
}

double reference_stiffness() {
    static const double d_ref = [] {
        const Device b = table1_device("B");
        return gate_stiffness(b.geometry.gate, b.material);
    }();
    return d_ref;
}

GateComplianceModel compliance_model(const DeviceGeometry& g, const ModelCoefficients& coeffs) {
    return GateComplianceModel{coeffs.k0, coeffs.p_c, g.gate.w * g.channel_height()};
}

namespace {
double effective_compliance(const GateComplianceModel& model, const FlapGateGeometry& geom, const Material& mat) {
    return model.compliance_scale * reference_stiffness() / gate_stiffness(geom, mat);
}
}  // namespace

GateState opening_area(double p, const GateComplianceModel& model, const FlapGateGeometry& geom,
                       const Material& mat) {
    const double linear = effective_compliance(model, geom, mat) * std::max(0.0, p - model.crack_pressure);
    const double a_fg = std::min(model.a_fg_max, linear);
    return GateState{a_fg, a_fg / model.a_fg_max};
}

}  // namespace fdr
