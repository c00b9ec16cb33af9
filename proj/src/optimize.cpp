#include "fdr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fdr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BudgetExhausted {};

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

std::vector<std::vector<double>> axis_simplex(const std::vector<double>& x0, double step) {
    std::vector<std::vector<double>> s{x0};
    for (std::size_t i = 0; i < x0.size(); ++i) {
        auto v = x0;
        v[i] += step;
        s.push_back(std::move(v));
    }
    return s;
}

NelderMeadResult nelder_mead(const Objective& f, std::vector<std::vector<double>> simplex,
                             const NelderMeadOptions& opt) {
    if (simplex.empty()) throw std::invalid_argument("nelder_mead: empty simplex");
    const std::size_t n = simplex.front().size();
    if (simplex.size() != n + 1) throw std::invalid_argument("nelder_mead: simplex needs n+1 vertices");
    for (const auto& v : simplex)
        if (v.size() != n) throw std::invalid_argument("nelder_mead: ragged simplex");
    if (opt.max_evals < 1) throw std::invalid_argument("nelder_mead: max_evals must be >= 1");

    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        if (res.evaluations >= opt.max_evals) throw BudgetExhausted{};
        ++res.evaluations;
        double v;
        try {
            v = f(x);
        } catch (const std::exception&) {
            v = kInf;
        }
        return std::isnan(v) ? kInf : v;
    };

    std::vector<double> fv(n + 1, kInf);
    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : order) {
            s2.push_back(simplex[i]);
            f2.push_back(fv[i]);
        }
        simplex = std::move(s2);
        fv = std::move(f2);
    };

    try {
        for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);
        res.converged = n == 0;  // a single point is its own optimum

        while (n > 0) {
            sort_simplex();

            double diam = 0.0;
            for (std::size_t i = 1; i <= n; ++i) {
                for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(simplex[i][k] - simplex[0][k]));
            }
            if (diam <= opt.diameter_tol * std::max(1.0, inf_norm(simplex[0]))) {
                res.converged = true;
                break;
            }

            std::vector<double> c(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k) c[k] += simplex[i][k] / static_cast<double>(n);
            auto along = [&](double coef, const std::vector<double>& x) {
                // c + coef (x - c)
                std::vector<double> out(n);
                for (std::size_t k = 0; k < n; ++k) out[k] = c[k] + coef * (x[k] - c[k]);
                return out;
            };
            const auto& worst = simplex[n];

            auto xr = along(-opt.reflection, worst);
            const double fr = eval(xr);
            if (fr < fv[0]) {
                auto xe = along(-opt.reflection * opt.expansion, worst);
                const double fe = eval(xe);
                if (fe < fr) {
                    simplex[n] = std::move(xe);
                    fv[n] = fe;
                } else {
                    simplex[n] = std::move(xr);
                    fv[n] = fr;
                }
                continue;
            }
            if (fr < fv[n - 1]) {
                simplex[n] = std::move(xr);
                fv[n] = fr;
                continue;
            }

            bool do_shrink = false;
            if (fr < fv[n]) {
                auto xc = along(-opt.reflection * opt.contraction, worst);
                const double fc = eval(xc);
                if (fc <= fr) {
                    simplex[n] = std::move(xc);
                    fv[n] = fc;
                } else {
                    do_shrink = true;
                }
            } else {
                auto xcc = along(opt.contraction, worst);
                const double fcc = eval(xcc);
                if (fcc < fv[n]) {
                    simplex[n] = std::move(xcc);
                    fv[n] = fcc;
                } else {
                    do_shrink = true;
                }
            }
            if (do_shrink) {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k)
                        simplex[i][k] = simplex[0][k] + opt.shrink * (simplex[i][k] - simplex[0][k]);
                    fv[i] = eval(simplex[i]);
                }
            }
        }
    } catch (const BudgetExhausted&) {
    }

    // best vertex seen in the final simplex
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = simplex[best];
    res.value = fv[best];
    return res;
}

NelderMeadResult minimize_in_box(const Objective& f, const std::vector<double>& lower,
                                 const std::vector<double>& upper, std::optional<std::vector<double>> start,
                                 double simplex_step, const NelderMeadOptions& options) {
    const std::size_t n = lower.size();
    if (upper.size() != n) throw std::invalid_argument("minimize_in_box: bound size mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(std::isfinite(lower[k]) && std::isfinite(upper[k])) || lower[k] > upper[k])
            throw std::invalid_argument("minimize_in_box: bounds must be finite with lower <= upper");
    }
    if (start && start->size() != n) throw std::invalid_argument("minimize_in_box: start size mismatch");

    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < n; ++k)
        if (upper[k] > lower[k]) free.push_back(k);

    std::vector<double> base(n);
    for (std::size_t k = 0; k < n; ++k) base[k] = start ? (*start)[k] : 0.5 * (lower[k] + upper[k]);
    for (std::size_t k = 0; k < n; ++k)
        if (upper[k] == lower[k]) base[k] = lower[k];

    auto to_x = [&](const std::vector<double>& u, double& dist2) {
        std::vector<double> x = base;
        dist2 = 0.0;
        for (std::size_t j = 0; j < free.size(); ++j) {
            const std::size_t k = free[j];
            const double uc = std::clamp(u[j], 0.0, 1.0);
            dist2 += (u[j] - uc) * (u[j] - uc);
            x[k] = lower[k] + uc * (upper[k] - lower[k]);
        }
        return x;
    };

    Objective g = [&](const std::vector<double>& u) {
        double dist2 = 0.0;
        const auto x = to_x(u, dist2);
        const double v = f(x);
        if (dist2 == 0.0) return v;
        return v + (1.0 + std::abs(v)) * dist2;
    };

    std::vector<double> u0(free.size());
    for (std::size_t j = 0; j < free.size(); ++j) {
        const std::size_t k = free[j];
        u0[j] = (base[k] - lower[k]) / (upper[k] - lower[k]);
    }

    NelderMeadResult r;
    if (free.empty()) {
        r = nelder_mead(g, {u0}, options);
    } else {
        r = nelder_mead(g, axis_simplex(u0, simplex_step), options);
    }
    double dist2 = 0.0;
    r.x = to_x(r.x, dist2);
    if (dist2 > 0.0) {
        // report the projected point with its unpenalised value
        try {
            r.value = f(r.x);
        } catch (const std::exception&) {
            r.value = kInf;
        }
    }
    return r;
}

// ---- geometry design ----------------------------------------------------

GeometryVector geometry_vector(const DeviceGeometry& g) { return {g.gate.w, g.gate.t, g.gate.h, g.a_ne}; }

Device with_geometry(const Device& base, const GeometryVector& x) {
    Device d = base;
    d.geometry.gate.w = x[0];
    d.geometry.gate.t = x[1];
    d.geometry.gate.h = x[2];
    d.geometry.a_ne = x[3];
    return d;
}

double evaluate_design(const DesignObjective& objective, const Device& device, const ModelCoefficients& coeffs) {
    if (objective.terms.empty()) throw std::invalid_argument("design objective has no terms");
    double total = 0.0;
    std::optional<SweepResult> ramp_result;
    for (const auto& term : objective.terms) {
        double v = 0.0;
        switch (term.kind) {
            case ObjectiveKind::switching_p_in: {
                if (!ramp_result)
                    ramp_result = sweep(device, coeffs, objective.ramp.q_start, objective.ramp.q_end,
                                        objective.ramp.step);
                if (!ramp_result->switching_p_in) return kInf;
                const double p = *ramp_result->switching_p_in;
                if (term.target_p_in) {
                    const double e = (p - *term.target_p_in) / *term.target_p_in;
                    v = e * e;
                } else {
                    v = p;
                }
                break;
            }
            case ObjectiveKind::max_suction:
                v = solve_operating_point(term.q_star, device, coeffs).p_out;
                break;
            case ObjectiveKind::max_blowing:
                v = -solve_operating_point(term.q_star, device, coeffs).p_out;
                break;
            case ObjectiveKind::match_curve: {
                if (term.curve_q.empty() || term.curve_q.size() != term.curve_p_out.size())
                    throw std::invalid_argument("match_curve needs equal-length, non-empty target vectors");
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < term.curve_q.size(); ++i) {
                    const double p = solve_operating_point(term.curve_q[i], device, coeffs).p_out;
                    num += (p - term.curve_p_out[i]) * (p - term.curve_p_out[i]);
                    den += term.curve_p_out[i] * term.curve_p_out[i];
                }
                v = den > 0.0 ? num / den : num;
                break;
            }
        }
        total += term.weight * v;
    }
    return total;
}

GeometryOptimum optimize_geometry(const DesignObjective& objective, const GeometryBounds& bounds,
                                  const ModelCoefficients& coeffs, const Device& base,
                                  std::optional<GeometryVector> start, double simplex_step,
                                  const NelderMeadOptions& options) {
    coeffs.validate();
    for (std::size_t k = 0; k < 4; ++k) {
        if (!(bounds.lower[k] > 0.0)) throw std::invalid_argument("geometry bounds must be positive");
    }
    std::vector<double> lo(bounds.lower.begin(), bounds.lower.end());
    std::vector<double> hi(bounds.upper.begin(), bounds.upper.end());
    std::optional<std::vector<double>> s0;
    if (start) s0 = std::vector<double>(start->begin(), start->end());

    Objective f = [&](const std::vector<double>& x) {
        const Device d = with_geometry(base, {x[0], x[1], x[2], x[3]});
        if (!validate_geometry(d.geometry).empty()) return kInf;
        return evaluate_design(objective, d, coeffs);
    };
    const NelderMeadResult r = minimize_in_box(f, lo, hi, s0, simplex_step, options);

    GeometryOptimum out;
    out.x = {r.x[0], r.x[1], r.x[2], r.x[3]};
    out.device = with_geometry(base, out.x);
    out.value = r.value;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    return out;
}

}  // namespace fdr
