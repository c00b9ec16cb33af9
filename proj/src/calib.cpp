#include "fdr/calib.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fdr/engine.hpp"
#include "fdr/errors.hpp"
#include "fdr/format.hpp"
#include "fdr/optimize.hpp"
#include "fdr/units.hpp"

namespace fdr {

MeasurementSet MeasurementSet::from_rows(std::string label, std::vector<MeasurementRow> rows) {
    for (const auto& r : rows) {
        if (!std::isfinite(r.q_in) || r.q_in < 0.0) throw std::invalid_argument("q_in must be finite and >= 0");
        if (r.multiplicity < 1) throw std::invalid_argument("row multiplicity must be >= 1");
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.q_in < b.q_in; });

    MeasurementSet set;
    set.label = std::move(label);
    for (auto& r : rows) {
        if (!set.rows.empty() && set.rows.back().q_in == r.q_in) {
            if (!set.rows.back().same_values(r)) {
                throw std::invalid_argument("conflicting rows at q_in = " +
                                            std::to_string(units::m3s_to_lpm(r.q_in)) + " L/min");
            }
            set.rows.back().multiplicity += r.multiplicity;
            continue;
        }
        set.rows.push_back(r);
    }
    return set;
}

std::size_t MeasurementSet::count_with_p_in() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.p_in.has_value(); }));
}

std::size_t MeasurementSet::count_with_p_out() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.p_out.has_value(); }));
}

MeasurementSet builtin_paper_points() {
    constexpr double pts[6][2] = {{5, 5.4}, {10, 13.5}, {15, 21.1}, {20, 32.2}, {25, 41.1}, {30, 47.1}};
    std::vector<MeasurementRow> rows;
    for (const auto& p : pts) {
        MeasurementRow r;
        r.q_in = units::lpm_to_m3s(p[0]);
        r.p_in = units::kpa_to_pa(p[1]);
        rows.push_back(r);
    }
    return MeasurementSet::from_rows("published", std::move(rows));
}

// ---- CSV ------------------------------------------------------------------

namespace {

constexpr std::string_view kHeader = "q_in_lpm,p_in_kpa,p_out_kpa,a_fg_mm2";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_field(std::string_view f, int line, std::string_view column) {
    f = trim(f);
    if (f.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ConfigError("line " + std::to_string(line) + ": bad number '" + std::string(f) + "' in column " +
                          std::string(column));
    }
    return v;
}


}  // namespace

MeasurementSet read_measurement_csv(std::istream& in, std::string label) {
    std::string line;
    int line_no = 0;
    bool have_header = false;
    std::vector<MeasurementRow> rows;
    static constexpr std::string_view columns[] = {"q_in_lpm", "p_in_kpa", "p_out_kpa", "a_fg_mm2"};

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (line_no == 1 && sv.size() >= 3 && sv.substr(0, 3) == "\xEF\xBB\xBF") sv.remove_prefix(3);  // BOM
        if (sv.empty() || sv.front() == '#') continue;
        if (!have_header) {
            std::string compact;
            for (char c : sv)
                if (c != ' ' && c != '\t') compact.push_back(c);
            if (compact != kHeader)
                throw ConfigError("line " + std::to_string(line_no) + ": expected header " + std::string(kHeader));
            have_header = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        for (;;) {
            const auto comma = sv.find(',', start);
            fields.push_back(sv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 4)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                              std::to_string(fields.size()));

        const auto q = parse_field(fields[0], line_no, columns[0]);
        if (!q) throw ConfigError("line " + std::to_string(line_no) + ": q_in_lpm is required");
        if (*q < 0.0) throw ConfigError("line " + std::to_string(line_no) + ": q_in_lpm must be >= 0");
        MeasurementRow r;
        r.q_in = units::lpm_to_m3s(*q);
        if (auto v = parse_field(fields[1], line_no, columns[1])) r.p_in = units::kpa_to_pa(*v);
        if (auto v = parse_field(fields[2], line_no, columns[2])) r.p_out = units::kpa_to_pa(*v);
        if (auto v = parse_field(fields[3], line_no, columns[3])) {
            if (*v < 0.0) throw ConfigError("line " + std::to_string(line_no) + ": a_fg_mm2 must be >= 0");
            r.a_fg = units::mm2_to_m2(*v);
        }
        rows.push_back(r);
    }
    if (!have_header) throw ConfigError("measurement file has no header line");
    try {
        return MeasurementSet::from_rows(std::move(label), std::move(rows));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

MeasurementSet load_measurement_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open measurement file " + path);
    return read_measurement_csv(in, path);
}

void write_measurement_csv(std::ostream& out, const MeasurementSet& data) {
    out << kHeader << '\n';
    for (const auto& r : data.rows) {
        for (int k = 0; k < r.multiplicity; ++k) {
            out << format_sig(units::m3s_to_lpm(r.q_in)) << ',';
            if (r.p_in) out << format_sig(units::pa_to_kpa(*r.p_in));
            out << ',';
            if (r.p_out) out << format_sig(units::pa_to_kpa(*r.p_out));
            out << ',';
            if (r.a_fg) out << format_sig(units::m2_to_mm2(*r.a_fg));
            out << '\n';
        }
    }
}

// ---- fits -----------------------------------------------------------------

const QuantityResiduals* FitReport::find(std::string_view quantity) const {
    for (const auto& q : quantities)
        if (q.quantity == quantity) return &q;
    return nullptr;
}

double rms_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

FitReport fit_input_pressure(const MeasurementSet& data, const ModelCoefficients& base) {
    std::vector<double> q, p;
    for (const auto& r : data.rows) {
        if (!r.p_in) continue;
        q.push_back(r.q_in);
        p.push_back(*r.p_in);
    }
    if (q.size() < 2) throw FitError("input pressure fit needs at least 2 rows with p_in");

    const double qs = *std::max_element(q.begin(), q.end());
    if (!(qs > 0.0)) throw FitError("input pressure fit is rank deficient (all q_in are zero)");

    // scaled unknowns a = c1 qs, b = c2 qs^2 on x = q/qs in [0, 1]
    double s2 = 0, s3 = 0, s4 = 0, sp1 = 0, sp2 = 0, spp = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double x = q[i] / qs;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        sp1 += x * p[i];
        sp2 += x * x * p[i];
        spp += p[i] * p[i];
    }
    const double det = s2 * s4 - s3 * s3;
    if (!(det > 1e-12 * s2 * s4))
        throw FitError("input pressure fit is rank deficient (need two distinct nonzero q_in)");

    auto sse = [&](double a, double b) {
        // sum (p - a x - b x^2)^2 expanded
        return spp - 2 * a * sp1 - 2 * b * sp2 + a * a * s2 + 2 * a * b * s3 + b * b * s4;
    };
    double a = (sp1 * s4 - sp2 * s3) / det;
    double b = (s2 * sp2 - s3 * sp1) / det;
    if (a < 0.0 || b < 0.0) {
        // nonnegative least squares over the faces of the quadrant
        const double a_only = std::max(0.0, sp1 / s2);
        const double b_only = std::max(0.0, sp2 / s4);
        if (sse(a_only, 0.0) <= sse(0.0, b_only)) {
            a = a_only;
            b = 0.0;
        } else {
            a = 0.0;
            b = b_only;
        }
    }

    FitReport rep;
    rep.coefficients = base;
    rep.coefficients.c1 = a / qs;
    rep.coefficients.c2 = b / (qs * qs);
    rep.fitted = {"c1", "c2"};

    // monotone on [0, max q]: dp/dq = c1 + 2 c2 q at both ends (linear in q)
    const double d0 = rep.coefficients.c1;
    const double d1 = rep.coefficients.c1 + 2.0 * rep.coefficients.c2 * qs;
    if (d0 < 0.0 || d1 < 0.0) throw FitError("fitted input pressure curve is not monotone");

    QuantityResiduals res{"p_in", {}, {}, 0.0};
    for (std::size_t i = 0; i < q.size(); ++i) {
        res.q_in.push_back(q[i]);
        res.residuals.push_back(p[i] - input_pressure(q[i], rep.coefficients));
    }
    res.rms = rms_of(res.residuals);
    rep.quantities.push_back(std::move(res));
    return rep;
}

// ---- closure fit ------------------------------------------------------------

namespace {

struct ClosureParam {
    const char* name;
    double ModelCoefficients::*field;
    double fallback_scale;  // step scale when the start value is 0
};

constexpr ClosureParam kClosureParams[] = {
    {"eta", &ModelCoefficients::eta, 0.05},
    {"c_recirc", &ModelCoefficients::c_recirc, 1.0},
    {"k0", &ModelCoefficients::k0, 1e-10},
    {"p_c", &ModelCoefficients::p_c, 1000.0},
};

}  // namespace

FitReport fit_closures(const std::vector<ClosureDataset>& datasets, const ModelCoefficients& start,
                       const ClosureFitOptions& options) {
    start.validate();
    if (datasets.empty()) throw FitError("closure fit needs at least one dataset");

    std::size_t n_p_out = 0;
    for (const auto& ds : datasets) n_p_out += ds.data.count_with_p_out();
    if (n_p_out == 0) throw FitError("closure fit: column p_out_kpa is empty");

    FitReport rep;
    rep.fitted = {"eta", "c_recirc", "k0", "p_c"};
    rep.warnings.push_back("leak_fraction does not affect p_out; held at its start value");
    for (const auto& ds : datasets) {
        bool pos = false, neg = false;
        for (const auto& r : ds.data.rows) {
            if (!r.p_out) continue;
            pos = pos || *r.p_out > kModeDeadband;
            neg = neg || *r.p_out < -kModeDeadband;
        }
        if (!(pos && neg)) {
            rep.warnings.push_back("dataset '" + ds.data.label +
                                   "' has no p_out sign change; switching point unconstrained");
        }
    }

    double sum_p2 = 0.0;
    for (const auto& ds : datasets)
        for (const auto& r : ds.data.rows)
            if (r.p_out) sum_p2 += *r.p_out * *r.p_out;
    if (!(sum_p2 > 0.0)) sum_p2 = 1.0;

    std::vector<double> scale;
    for (const auto& p : kClosureParams) {
        const double v = start.*(p.field);
        scale.push_back(v != 0.0 ? std::abs(v) : p.fallback_scale);
    }
    auto coeffs_at = [&](const std::vector<double>& u) {
        ModelCoefficients c = start;
        for (std::size_t k = 0; k < std::size(kClosureParams); ++k)
            c.*(kClosureParams[k].field) = start.*(kClosureParams[k].field) + scale[k] * u[k];
        return c;
    };

    Objective f = [&](const std::vector<double>& u) {
        const ModelCoefficients c = coeffs_at(u);
        if (!c.violations().empty()) return std::numeric_limits<double>::infinity();
        double sp = 0.0;
        for (const auto& ds : datasets) {
            for (const auto& r : ds.data.rows) {
                if (!r.p_out) continue;
                const double d = solve_operating_point(r.q_in, ds.device, c).p_out - *r.p_out;
                sp += d * d;
            }
        }
        return sp / sum_p2;
    };

    std::vector<double> u(std::size(kClosureParams), 0.0);
    NelderMeadOptions nm;
    nm.max_evals = options.max_evals;
    nm.diameter_tol = 1e-9;
    double best = std::numeric_limits<double>::infinity();
    for (int run = 0; run <= options.restarts; ++run) {
        const NelderMeadResult r = nelder_mead(f, axis_simplex(u, options.simplex_step), nm);
        rep.evaluations += r.evaluations;
        if (r.value < best) {
            best = r.value;
            u = r.x;
        }
        if (best == 0.0) break;
        if (r.converged && run > 0 && r.value >= best) break;  // restart brought nothing new
    }
    rep.objective = best;
    rep.coefficients = coeffs_at(u);

    QuantityResiduals rp{"p_out", {}, {}, 0.0};
    QuantityResiduals ra{"a_fg", {}, {}, 0.0};
    for (const auto& ds : datasets) {
        for (const auto& r : ds.data.rows) {
            if (!r.p_out && !r.a_fg) continue;
            const OperatingState st = solve_operating_point(r.q_in, ds.device, rep.coefficients);
            if (r.p_out) {
                rp.q_in.push_back(r.q_in);
                rp.residuals.push_back(*r.p_out - st.p_out);
            }
            if (r.a_fg) {
                ra.q_in.push_back(r.q_in);
                ra.residuals.push_back(*r.a_fg - st.a_fg);
            }
        }
    }
    rp.rms = rms_of(rp.residuals);
    rep.quantities.push_back(std::move(rp));
    if (!ra.residuals.empty()) {
        ra.rms = rms_of(ra.residuals);
        rep.quantities.push_back(std::move(ra));
    }
    return rep;
}

MeasurementSet simulate_measurements(const Device& device, const ModelCoefficients& coeffs,
                                     const std::vector<double>& q_list, std::string label) {
    std::vector<MeasurementRow> rows;
    for (double q : q_list) {
        const OperatingState st = solve_operating_point(q, device, coeffs);
        MeasurementRow r;
        r.q_in = q;
        r.p_in = st.p_in;
        r.p_out = st.p_out;
        r.a_fg = st.a_fg;
        rows.push_back(r);
    }
    return MeasurementSet::from_rows(std::move(label), std::move(rows));
}

}  // namespace fdr
