#pragma once

#include <vector>

#include "fdr/core.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

/// One sled-pull measurement.
struct FrictionSample {
    double weight_load = 0.0;  // W, N
    double f_slip = 0.0;       // force at slip onset, N
    double f_mean = 0.0;       // mean sliding force, N
};

struct FrictionCoefficients {
    double mu_s = 0.0;
    double mu_k = 0.0;
};

struct FrictionPrediction {
    double mu_s = 0.0;
    double mu_k = 0.0;
    double n_eff = 0.0;  // N
};

/// Default suction-acting contact area (1 cm^2).
inline constexpr double kDefaultContactArea = 1e-4;

/// mu_s = f_slip / W, mu_k = f_mean / W. Throws std::domain_error unless
/// W > 0 and both forces are >= 0.
FrictionCoefficients coefficients_from_sample(const FrictionSample& s);

/// n_eff = max(0, W - p_out a_eff): suction (p_out < 0) presses the pad down,
/// blowing lifts it.
double effective_normal(double weight_load, double p_out, double a_eff);

/// Base coefficients scaled by n_eff / W.
FrictionPrediction predict_coefficients(double mu0_s, double mu0_k, double weight_load, double p_out, double a_eff);

struct FrictionPoint {
    double q_in = 0.0;   // m^3/s
    double p_out = 0.0;  // Pa
    FrictionPrediction prediction;
};

/// Solves each operating point and predicts the coefficients there.
std::vector<FrictionPoint> friction_curve(const Device& device, const ModelCoefficients& coeffs, double mu0_s,
                                          double mu0_k, double weight_load, double a_eff,
                                          const std::vector<double>& q_list);

}  // namespace fdr
