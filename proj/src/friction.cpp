#include "fdr/friction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fdr/engine.hpp"

namespace fdr {

FrictionCoefficients coefficients_from_sample(const FrictionSample& s) {
    if (!(s.weight_load > 0.0)) throw std::domain_error("weight load must be > 0");
    if (!(s.f_slip >= 0.0) || !(s.f_mean >= 0.0)) throw std::domain_error("friction forces must be >= 0");
    return {s.f_slip / s.weight_load, s.f_mean / s.weight_load};
}

double effective_normal(double weight_load, double p_out, double a_eff) {
    if (!(weight_load >= 0.0)) throw std::domain_error("weight load must be >= 0");
    if (!(a_eff > 0.0)) throw std::domain_error("a_eff must be > 0");
    return std::max(0.0, weight_load - p_out * a_eff);
}

FrictionPrediction predict_coefficients(double mu0_s, double mu0_k, double weight_load, double p_out, double a_eff) {
    if (!(weight_load > 0.0)) throw std::domain_error("weight load must be > 0");
    if (!(mu0_s > 0.0) || !(mu0_k > 0.0)) throw std::domain_error("base friction coefficients must be > 0");
    const double n = effective_normal(weight_load, p_out, a_eff);
    const double factor = n / weight_load;
    return {mu0_s * factor, mu0_k * factor, n};
}

std::vector<FrictionPoint> friction_curve(const Device& device, const ModelCoefficients& coeffs, double mu0_s,
                                          double mu0_k, double weight_load, double a_eff,
                                          const std::vector<double>& q_list) {
    if (q_list.empty()) throw std::invalid_argument("friction_curve needs at least one flow rate");
    for (double q : q_list)
        if (!(q >= 0.0)) throw std::domain_error("flow rates must be >= 0");

    std::vector<FrictionPoint> out;
    out.reserve(q_list.size());
    for (double q : q_list) {
        const OperatingState st = solve_operating_point(q, device, coeffs);
        out.push_back({q, st.p_out, predict_coefficients(mu0_s, mu0_k, weight_load, st.p_out, a_eff)});
    }
    return out;
}

}  // namespace fdr
