#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "fdr/core.hpp"
#include "fdr/engine.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
    int max_evals = 400;
    double diameter_tol = 1e-6;  // relative to max(1, |best vertex|)
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;  // diameter criterion met (vs. budget exhausted)
};

/// Plain Nelder-Mead from an explicit n+1 vertex simplex. Objective
/// exceptions and NaN count as +infinity.
NelderMeadResult nelder_mead(const Objective& f, std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& options = {});

/// Axis-aligned seed simplex: x0 plus x0 + step_i e_i.
std::vector<std::vector<double>> axis_simplex(const std::vector<double>& x0, double step);

/// Nelder-Mead over the box [lower, upper]. Coordinates are normalised to the
/// unit box; a point outside is evaluated at its projection plus a penalty
/// growing with the squared distance. Degenerate dimensions (lower == upper)
/// are held fixed. The start defaults to the box centre.
NelderMeadResult minimize_in_box(const Objective& f, const std::vector<double>& lower,
                                 const std::vector<double>& upper, std::optional<std::vector<double>> start = {},
                                 double simplex_step = 0.1, const NelderMeadOptions& options = {});

// ---- geometry design ----------------------------------------------------

/// Design vector (w, t, h, a_ne), SI units.
using GeometryVector = std::array<double, 4>;

struct GeometryBounds {
    GeometryVector lower{};
    GeometryVector upper{};
};

GeometryVector geometry_vector(const DeviceGeometry& g);
Device with_geometry(const Device& base, const GeometryVector& x);

enum class ObjectiveKind {
    switching_p_in,  // (p_sw - target)^2 / target^2, or p_sw itself without a target
    max_suction,     // p_out at q_star (more negative is better)
    max_blowing,     // -p_out at q_star
    match_curve,     // sum (p_out - target)^2 / sum target^2 over the target curve
};

struct ObjectiveTerm {
    ObjectiveKind kind = ObjectiveKind::switching_p_in;
    double weight = 1.0;
    std::optional<double> target_p_in;  // Pa, switching_p_in only
    double q_star = 30.0 / 60000.0;     // m^3/s, max_suction / max_blowing
    std::vector<double> curve_q;        // m^3/s, match_curve
    std::vector<double> curve_p_out;    // Pa, match_curve
};

struct DesignObjective {
    std::vector<ObjectiveTerm> terms;  // weighted sum
    RampSpec ramp{};                   // used by switching_p_in
};

/// Objective value of one device. Throws whatever the engine throws; a
/// switching_p_in term without a switching point is +infinity.
double evaluate_design(const DesignObjective& objective, const Device& device, const ModelCoefficients& coeffs);

struct GeometryOptimum {
    Device device;
    GeometryVector x{};
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Nelder-Mead over the (w, t, h, a_ne) box. Material, fluid and all other
/// dimensions come from base. Start defaults to the box centre.
GeometryOptimum optimize_geometry(const DesignObjective& objective, const GeometryBounds& bounds,
                                  const ModelCoefficients& coeffs, const Device& base,
                                  std::optional<GeometryVector> start = {}, double simplex_step = 0.1,
                                  const NelderMeadOptions& options = {});

}  // namespace fdr
