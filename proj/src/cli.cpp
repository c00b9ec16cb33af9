#include "fdr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fdr/calib.hpp"
#include "fdr/config_io.hpp"
#include "fdr/engine.hpp"
#include "fdr/errors.hpp"
#include "fdr/format.hpp"
#include "fdr/friction.hpp"
#include "fdr/gate.hpp"
#include "fdr/optimize.hpp"
#include "fdr/units.hpp"

namespace fdr::cli {

using nlohmann::json;

Device RunConfig::device() const {
    if (type_id && device_path) throw ConfigError("give either --type or --device, not both");
    if (type_id) return table1_device(*type_id);
    if (device_path) return load_device_file(*device_path);
    throw ConfigError("a device is required: --type <A..K> or --device <file.json>");
}

ModelCoefficients RunConfig::coefficients() const {
    if (!coeffs_path) return ModelCoefficients{};
    return load_coefficients_file(*coeffs_path);
}

namespace {

std::string num(double v) { return format_sig(v); }

std::string opt_num(const std::optional<double>& v, double scale = 1.0) {
    return v ? num(*v * scale) : std::string();
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
    std::string body = text;
    if (body.empty() || body.back() != '\n') body.push_back('\n');
    if (cfg.out_path.empty()) {
        out << body;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + cfg.out_path);
    f << body;
    if (!f) throw ConfigError("write failed: " + cfg.out_path);
}

void check_format(const RunConfig& cfg) {
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("--format must be csv or json");
}

void warn_supersonic(const std::vector<OperatingState>& states, std::ostream& err, const std::string& label = "") {
    for (const auto& s : states) {
        if (s.supersonic_jet) {
            err << "warning: " << (label.empty() ? "" : label + ": ") << "nozzle jet velocity exceeds the speed of sound from q_in = "
                << num(units::m3s_to_lpm(s.q_in)) << " L/min; the model stays incompressible there\n";
            return;
        }
    }
}

// ---- operating-state tables --------------------------------------------------

const char* kStateHeader = "q_in_lpm,p_in_kpa,p_chamber_kpa,a_fg_mm2,a_fg_over_a_ex,p_out_kpa,mode";
const char* kStateHeaderSi = ",q_in_m3s,p_in_pa,p_chamber_pa,a_fg_m2,p_out_pa";

std::string state_row(const OperatingState& s, const Device& d, bool si) {
    std::string r = num(units::m3s_to_lpm(s.q_in)) + ',' + num(units::pa_to_kpa(s.p_in)) + ',' +
                    num(units::pa_to_kpa(s.p_chamber)) + ',' + num(units::m2_to_mm2(s.a_fg)) + ',' +
                    num(opening_ratio(s.a_fg, d.geometry.a_ex)) + ',' + num(units::pa_to_kpa(s.p_out)) + ',' +
                    std::string(to_string(s.mode));
    if (si) r += ',' + num(s.q_in) + ',' + num(s.p_in) + ',' + num(s.p_chamber) + ',' + num(s.a_fg) + ',' + num(s.p_out);
    return r;
}

json state_json(const OperatingState& s, const Device& d) {
    return json{{"q_in_lpm", units::m3s_to_lpm(s.q_in)},
                {"p_in_kpa", units::pa_to_kpa(s.p_in)},
                {"p_chamber_kpa", units::pa_to_kpa(s.p_chamber)},
                {"a_fg_mm2", units::m2_to_mm2(s.a_fg)},
                {"a_fg_over_a_ex", opening_ratio(s.a_fg, d.geometry.a_ex)},
                {"p_out_kpa", units::pa_to_kpa(s.p_out)},
                {"mode", std::string(to_string(s.mode))},
                {"si",
                 {{"q_in_m3s", s.q_in},
                  {"p_in_pa", s.p_in},
                  {"p_chamber_pa", s.p_chamber},
                  {"a_fg_m2", s.a_fg},
                  {"p_out_pa", s.p_out}}},
                {"fixed_point_iterations", s.fixed_point_iterations},
                {"network_residual", s.network.residual_norm}};
}

json optional_json(const std::optional<double>& v, double scale) { return v ? json(*v * scale) : json(nullptr); }

std::string sweep_summary_csv(const SweepResult& r) {
    std::string s;
    s += "# switching_q_lpm=" + (r.switching_q ? num(units::m3s_to_lpm(*r.switching_q)) : std::string("none")) + '\n';
    s += "# switching_p_in_kpa=" + (r.switching_p_in ? num(units::pa_to_kpa(*r.switching_p_in)) : std::string("none")) +
         '\n';
    s += "# max_blow_kpa=" + num(units::pa_to_kpa(r.max_blow)) + '\n';
    s += "# max_suck_kpa=" + num(units::pa_to_kpa(r.max_suck)) + '\n';
    s += "# sign_changes=" + std::to_string(r.sign_changes) + '\n';
    return s;
}

json sweep_summary_json(const SweepResult& r) {
    return json{{"switching_q_lpm", optional_json(r.switching_q, 60000.0)},
                {"switching_p_in_kpa", optional_json(r.switching_p_in, 1e-3)},
                {"max_blow_kpa", units::pa_to_kpa(r.max_blow)},
                {"max_suck_kpa", units::pa_to_kpa(r.max_suck)},
                {"sign_changes", r.sign_changes}};
}

// ---- option helpers -----------------------------------------------------------

void add_device_options(CLI::App* sub, RunConfig& cfg) {
    auto* t = sub->add_option("--type", cfg.type_id, "built-in device type letter (A..K)");
    auto* d = sub->add_option("--device", cfg.device_path, "device JSON file");
    t->excludes(d);
    d->excludes(t);
}

void add_common_options(CLI::App* sub, RunConfig& cfg, const std::string& default_format) {
    cfg.format = default_format;
    sub->add_option("--coeffs", cfg.coeffs_path, "model coefficient JSON (a calibrate report also works)");
    sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
    sub->add_option("--format", cfg.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

struct Ramp {
    double from_lpm = 0.0;
    double to_lpm = 30.0;
    double step_lpm = 0.1;
};

void add_ramp_options(CLI::App* sub, Ramp& ramp) {
    sub->add_option("--from-lpm", ramp.from_lpm, "first flow rate of the ramp [L/min]")->capture_default_str();
    sub->add_option("--to-lpm", ramp.to_lpm, "last flow rate of the ramp [L/min]")->capture_default_str();
    sub->add_option("--step-lpm", ramp.step_lpm, "ramp step [L/min]")->capture_default_str();
}

RampSpec to_ramp(const Ramp& r) {
    if (!(r.step_lpm > 0.0)) throw ConfigError("--step-lpm must be > 0");
    if (!(r.from_lpm >= 0.0)) throw ConfigError("--from-lpm must be >= 0");
    if (!(r.from_lpm < r.to_lpm)) throw ConfigError("--from-lpm must be below --to-lpm");
    return RampSpec{units::lpm_to_m3s(r.from_lpm), units::lpm_to_m3s(r.to_lpm), units::lpm_to_m3s(r.step_lpm)};
}

SweepOptions sweep_options() {
    SweepOptions o;
    o.workers = workers_from_env();
    return o;
}

// ---- commands -------------------------------------------------------------------

struct SimulateArgs {
    RunConfig cfg;
    double q_lpm = 0.0;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    check_format(a.cfg);
    if (!(a.q_lpm >= 0.0)) throw ConfigError("--qin-lpm must be >= 0");
    const Device dev = a.cfg.device();
    const ModelCoefficients c = a.cfg.coefficients();
    c.validate();
    const OperatingState s = solve_operating_point(units::lpm_to_m3s(a.q_lpm), dev, c);
    warn_supersonic({s}, err);

    if (a.cfg.format == "json") {
        json j = state_json(s, dev);
        j["device"] = dev.label;
        emit(a.cfg, j.dump(2), out);
        return;
    }
    std::string text = std::string(kStateHeader) + kStateHeaderSi + '\n' + state_row(s, dev, true) + '\n';
    emit(a.cfg, text, out);
}

struct SweepArgs {
    RunConfig cfg;
    Ramp ramp;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    check_format(a.cfg);
    const RampSpec ramp = to_ramp(a.ramp);
    const Device dev = a.cfg.device();
    const ModelCoefficients c = a.cfg.coefficients();
    const SweepResult r = sweep(dev, c, ramp.q_start, ramp.q_end, ramp.step, sweep_options());
    warn_supersonic(r.states, err);

    if (a.cfg.format == "json") {
        json states = json::array();
        for (const auto& s : r.states) states.push_back(state_json(s, dev));
        json j = sweep_summary_json(r);
        j["device"] = dev.label;
        j["states"] = std::move(states);
        emit(a.cfg, j.dump(2), out);
        return;
    }
    std::ostringstream os;
    os << kStateHeader << (a.cfg.si ? kStateHeaderSi : "") << '\n';
    for (const auto& s : r.states) os << state_row(s, dev, a.cfg.si) << '\n';
    os << "# device=" << dev.label << '\n' << sweep_summary_csv(r);
    emit(a.cfg, os.str(), out);
}

struct CompareArgs {
    RunConfig cfg;
    Ramp ramp;
    std::vector<std::string> types;
    std::string curves_out;
};

void cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
    check_format(a.cfg);
    const RampSpec ramp = to_ramp(a.ramp);
    const std::vector<std::string> types = a.types.empty() ? table1_type_ids() : a.types;
    const ModelCoefficients c = a.cfg.coefficients();
    const std::vector<DesignRow> rows = compare_designs(types, c, ramp, sweep_options());
    for (const auto& r : rows) warn_supersonic(r.result.states, err, r.type_id);
    const std::vector<OrderingEntry> report = ordering_report(rows);

    if (!a.curves_out.empty()) {
        std::ostringstream os;
        os << "type," << kStateHeader << (a.cfg.si ? kStateHeaderSi : "") << '\n';
        for (const auto& r : rows) {
            const Device dev = table1_device(r.type_id);
            for (const auto& s : r.result.states) os << r.type_id << ',' << state_row(s, dev, a.cfg.si) << '\n';
        }
        RunConfig curves = a.cfg;
        curves.out_path = a.curves_out;
        emit(curves, os.str(), out);
    }

    if (a.cfg.format == "json") {
        json arr = json::array();
        for (const auto& e : report) {
            arr.push_back({{"type", e.type_id},
                           {"switching_q_lpm", optional_json(e.switching_q, 60000.0)},
                           {"switching_p_in_kpa", optional_json(e.switching_p_in, 1e-3)},
                           {"max_blow_kpa", units::pa_to_kpa(e.max_blow)},
                           {"max_suck_kpa", units::pa_to_kpa(e.max_suck)},
                           {"p_out_end_kpa", units::pa_to_kpa(e.p_out_at_end)},
                           {"sign_changes", e.sign_changes}});
        }
        emit(a.cfg, json{{"ordering", arr}}.dump(2), out);
        return;
    }
    std::ostringstream os;
    os << "type,switching_q_lpm,switching_p_in_kpa,max_blow_kpa,max_suck_kpa,p_out_end_kpa,sign_changes\n";
    for (const auto& e : report) {
        os << e.type_id << ',' << opt_num(e.switching_q, 60000.0) << ',' << opt_num(e.switching_p_in, 1e-3) << ','
           << num(units::pa_to_kpa(e.max_blow)) << ',' << num(units::pa_to_kpa(e.max_suck)) << ','
           << num(units::pa_to_kpa(e.p_out_at_end)) << ',' << e.sign_changes << '\n';
    }
    emit(a.cfg, os.str(), out);
}

struct CalibrateArgs {
    RunConfig cfg;
    std::vector<std::string> data;
    std::string fit = "input";
    std::vector<std::string> types;
    std::vector<std::string> devices;
    int max_evals = 1500;
};

MeasurementSet load_data(const std::string& source) {
    if (source == "published") return builtin_paper_points();
    return load_measurement_csv(source);
}

void cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
    check_format(a.cfg);
    const std::vector<std::string> sources = a.data.empty() ? std::vector<std::string>{"published"} : a.data;
    const ModelCoefficients start = a.cfg.coefficients();

    FitReport rep;
    if (a.fit == "input") {
        if (sources.size() != 1) throw ConfigError("the input-pressure fit takes exactly one --data source");
        rep = fit_input_pressure(load_data(sources.front()), start);
    } else if (a.fit == "closures") {
        if (!a.types.empty() && !a.devices.empty()) throw ConfigError("give --type or --device, not both");
        const std::size_t n_dev = a.types.size() + a.devices.size();
        if (n_dev != sources.size())
            throw ConfigError("the closure fit needs one --type/--device per --data file (" + std::to_string(n_dev) +
                              " devices, " + std::to_string(sources.size()) + " data sources)");
        std::vector<ClosureDataset> sets;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            const Device dev = a.types.empty() ? load_device_file(a.devices[i]) : table1_device(a.types[i]);
            sets.push_back({dev, load_data(sources[i])});
        }
        ClosureFitOptions opt;
        opt.max_evals = a.max_evals;
        rep = fit_closures(sets, start, opt);
    } else {
        throw ConfigError("--fit must be input or closures");
    }
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';

    auto display = [](const std::string& quantity, double v) {
        if (quantity == "a_fg") return units::m2_to_mm2(v);
        return units::pa_to_kpa(v);
    };
    auto unit_of = [](const std::string& quantity) { return quantity == "a_fg" ? "mm2" : "kpa"; };

    if (a.cfg.format == "json") {
        json rms = json::object();
        json residuals = json::object();
        for (const auto& q : rep.quantities) {
            rms[q.quantity + "_" + unit_of(q.quantity)] = display(q.quantity, q.rms);
            json list = json::array();
            for (std::size_t i = 0; i < q.residuals.size(); ++i)
                list.push_back({{"q_in_lpm", units::m3s_to_lpm(q.q_in[i])},
                                {std::string("residual_") + unit_of(q.quantity), display(q.quantity, q.residuals[i])}});
            residuals[q.quantity] = std::move(list);
        }
        const json j{{"fit", a.fit},
                     {"data", sources},
                     {"fitted", rep.fitted},
                     {"coefficients", coefficients_to_json(rep.coefficients)},
                     {"rms", rms},
                     {"residuals", residuals},
                     {"warnings", rep.warnings},
                     {"evaluations", rep.evaluations},
                     {"objective", rep.objective}};
        emit(a.cfg, j.dump(2), out);
        return;
    }
    std::ostringstream os;
    os << "quantity,q_in_lpm,residual,unit\n";
    for (const auto& q : rep.quantities)
        for (std::size_t i = 0; i < q.residuals.size(); ++i)
            os << q.quantity << ',' << num(units::m3s_to_lpm(q.q_in[i])) << ','
               << num(display(q.quantity, q.residuals[i])) << ',' << unit_of(q.quantity) << '\n';
    for (const auto& q : rep.quantities)
        os << "# rms_" << q.quantity << '_' << unit_of(q.quantity) << '=' << num(display(q.quantity, q.rms)) << '\n';
    const json coeffs = coefficients_to_json(rep.coefficients);
    for (const auto& [key, value] : coeffs.items())
        os << "# " << key << '=' << num(value.get<double>()) << '\n';
    emit(a.cfg, os.str(), out);
}

struct OptimizeArgs {
    RunConfig cfg;
    std::vector<std::string> objectives;
    std::vector<double> weights;
    std::optional<double> target_p_in_kpa;
    double q_star_lpm = 30.0;
    std::optional<std::string> match_type;
    std::optional<std::string> match_data;
    Ramp ramp;  // switching objective and generated match curves
    double curve_step_lpm = 1.0;
    std::vector<double> w_mm, t_mm, h_mm, a_ne_mm2;  // lo,hi
    std::vector<double> start;
    int max_evals = 400;
    double simplex_step = 0.1;
};

void cmd_optimize(const OptimizeArgs& a, std::ostream& out, std::ostream&) {
    check_format(a.cfg);
    const Device base = a.cfg.device();
    const ModelCoefficients c = a.cfg.coefficients();
    const GeometryVector x0 = geometry_vector(base.geometry);

    GeometryBounds bounds{x0, x0};
    auto set_bound = [&](const std::vector<double>& v, std::size_t k, double to_si, const char* flag) {
        if (v.empty()) return;
        if (v.size() != 2 || !(v[0] <= v[1]) || !(v[0] > 0.0))
            throw ConfigError(std::string(flag) + " takes lo,hi with 0 < lo <= hi");
        bounds.lower[k] = v[0] * to_si;
        bounds.upper[k] = v[1] * to_si;
    };
    set_bound(a.w_mm, 0, 1e-3, "--w-mm");
    set_bound(a.t_mm, 1, 1e-3, "--t-mm");
    set_bound(a.h_mm, 2, 1e-3, "--h-mm");
    set_bound(a.a_ne_mm2, 3, 1e-6, "--ane-mm2");

    std::optional<GeometryVector> start;
    if (!a.start.empty()) {
        if (a.start.size() != 4) throw ConfigError("--start takes w_mm,t_mm,h_mm,a_ne_mm2");
        start = GeometryVector{a.start[0] * 1e-3, a.start[1] * 1e-3, a.start[2] * 1e-3, a.start[3] * 1e-6};
    }

    if (a.objectives.empty()) throw ConfigError("--objective is required");
    if (!a.weights.empty() && a.weights.size() != a.objectives.size())
        throw ConfigError("--weight needs one value per --objective");

    DesignObjective obj;
    obj.ramp = to_ramp(a.ramp);
    for (std::size_t i = 0; i < a.objectives.size(); ++i) {
        ObjectiveTerm t;
        t.weight = a.weights.empty() ? 1.0 : a.weights[i];
        t.q_star = units::lpm_to_m3s(a.q_star_lpm);
        const std::string& name = a.objectives[i];
        if (name == "switching-p-in") {
            t.kind = ObjectiveKind::switching_p_in;
            if (a.target_p_in_kpa) t.target_p_in = units::kpa_to_pa(*a.target_p_in_kpa);
        } else if (name == "max-suction") {
            t.kind = ObjectiveKind::max_suction;
        } else if (name == "max-blowing") {
            t.kind = ObjectiveKind::max_blowing;
        } else if (name == "match-curve") {
            t.kind = ObjectiveKind::match_curve;
            if (a.match_type && a.match_data) throw ConfigError("give --match-type or --match-data, not both");
            if (a.match_data) {
                for (const auto& r : load_measurement_csv(*a.match_data).rows) {
                    if (!r.p_out) continue;
                    t.curve_q.push_back(r.q_in);
                    t.curve_p_out.push_back(*r.p_out);
                }
                if (t.curve_q.empty()) throw ConfigError("--match-data: column p_out_kpa is empty");
            } else if (a.match_type) {
                const Device target = table1_device(*a.match_type);
                if (!(a.curve_step_lpm > 0.0)) throw ConfigError("--curve-step-lpm must be > 0");
                for (double q : sweep_grid(obj.ramp.q_start, obj.ramp.q_end, units::lpm_to_m3s(a.curve_step_lpm))) {
                    t.curve_q.push_back(q);
                    t.curve_p_out.push_back(solve_operating_point(q, target, c).p_out);
                }
            } else {
                throw ConfigError("match-curve needs --match-type or --match-data");
            }
        } else {
            throw ConfigError("unknown objective '" + name +
                              "' (valid: switching-p-in, max-suction, max-blowing, match-curve)");
        }
        obj.terms.push_back(std::move(t));
    }

    NelderMeadOptions nm;
    nm.max_evals = a.max_evals;
    const GeometryOptimum best = optimize_geometry(obj, bounds, c, base, start, a.simplex_step, nm);

    if (a.cfg.format == "json") {
        const json j{{"w_mm", best.x[0] * 1e3},
                     {"t_mm", best.x[1] * 1e3},
                     {"h_mm", best.x[2] * 1e3},
                     {"a_ne_mm2", best.x[3] * 1e6},
                     {"objective", best.value},
                     {"evaluations", best.evaluations},
                     {"converged", best.converged},
                     {"device", device_to_json(best.device)}};
        emit(a.cfg, j.dump(2), out);
        return;
    }
    std::ostringstream os;
    os << "w_mm,t_mm,h_mm,a_ne_mm2,objective,evaluations,converged\n"
       << num(best.x[0] * 1e3) << ',' << num(best.x[1] * 1e3) << ',' << num(best.x[2] * 1e3) << ','
       << num(best.x[3] * 1e6) << ',' << num(best.value) << ',' << best.evaluations << ','
       << (best.converged ? "true" : "false") << '\n';
    emit(a.cfg, os.str(), out);
}

struct FrictionArgs {
    RunConfig cfg;
    std::optional<double> weight_n;
    std::optional<double> weight_gf;
    double mu0_s = 0.5;
    double mu0_k = 0.4;
    double a_eff_cm2 = 1.0;
    std::vector<double> q_lpm{0.0, 10.0, 20.0, 30.0};
};

void cmd_friction(const FrictionArgs& a, std::ostream& out, std::ostream& err) {
    check_format(a.cfg);
    if (a.weight_n.has_value() == a.weight_gf.has_value())
        throw ConfigError("give exactly one of --weight-n or --weight-gf");
    const double w = a.weight_n ? *a.weight_n : units::gf_to_n(*a.weight_gf);
    if (!(w > 0.0)) throw ConfigError("the weight load must be > 0");
    if (!(a.a_eff_cm2 > 0.0)) throw ConfigError("--a-eff-cm2 must be > 0");
    if (a.q_lpm.empty()) throw ConfigError("--qin-lpm needs at least one value");
    std::vector<double> q;
    for (double v : a.q_lpm) {
        if (!(v >= 0.0)) throw ConfigError("--qin-lpm values must be >= 0");
        q.push_back(units::lpm_to_m3s(v));
    }
    const Device dev = a.cfg.device();
    const ModelCoefficients c = a.cfg.coefficients();
    c.validate();
    const auto pts = friction_curve(dev, c, a.mu0_s, a.mu0_k, w, a.a_eff_cm2 * 1e-4, q);
    (void)err;

    if (a.cfg.format == "json") {
        json arr = json::array();
        for (const auto& p : pts) {
            arr.push_back({{"q_in_lpm", units::m3s_to_lpm(p.q_in)},
                           {"p_out_kpa", units::pa_to_kpa(p.p_out)},
                           {"weight_n", w},
                           {"n_eff_n", p.prediction.n_eff},
                           {"mu_s", p.prediction.mu_s},
                           {"mu_k", p.prediction.mu_k},
                           {"mode", std::string(to_string(classify_mode(p.p_out)))}});
        }
        emit(a.cfg, json{{"device", dev.label}, {"points", arr}}.dump(2), out);
        return;
    }
    std::ostringstream os;
    os << "q_in_lpm,p_out_kpa,weight_n,n_eff_n,mu_s,mu_k,mode\n";
    for (const auto& p : pts) {
        os << num(units::m3s_to_lpm(p.q_in)) << ',' << num(units::pa_to_kpa(p.p_out)) << ',' << num(w) << ','
           << num(p.prediction.n_eff) << ',' << num(p.prediction.mu_s) << ',' << num(p.prediction.mu_k) << ','
           << to_string(classify_mode(p.p_out)) << '\n';
    }
    emit(a.cfg, os.str(), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flow-direction-reversal device simulator"};
    app.name("fdr");
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "solve one operating point");
    add_device_options(s_sim, sim.cfg);
    add_common_options(s_sim, sim.cfg, "csv");
    s_sim->add_option("--qin-lpm", sim.q_lpm, "input flow rate [L/min]")->required();

    SweepArgs sw;
    auto* s_sweep = app.add_subcommand("sweep", "quasi-static flow ramp with switching-point detection");
    add_device_options(s_sweep, sw.cfg);
    add_common_options(s_sweep, sw.cfg, "csv");
    add_ramp_options(s_sweep, sw.ramp);
    s_sweep->add_flag("--si", sw.cfg.si, "append SI columns (m^3/s, Pa, m^2)");

    CompareArgs cmp;
    auto* s_cmp = app.add_subcommand("compare", "sweep several built-in device types and report switching orderings");
    add_common_options(s_cmp, cmp.cfg, "csv");
    add_ramp_options(s_cmp, cmp.ramp);
    s_cmp->add_option("--types", cmp.types, "comma-separated built-in type letters (default: all)")->delimiter(',');
    s_cmp->add_option("--curves-out", cmp.curves_out, "also write every sweep as long-format CSV");
    s_cmp->add_flag("--si", cmp.cfg.si, "append SI columns to --curves-out (m^3/s, Pa, m^2)");

    CalibrateArgs cal;
    auto* s_cal = app.add_subcommand("calibrate", "fit model coefficients to measurements");
    add_common_options(s_cal, cal.cfg, "json");
    s_cal->add_option("--data", cal.data,
                      "'published' (built-in pressure-flow points) or measurement CSV; comma-separated for several devices")
        ->delimiter(',');
    s_cal->add_option("--fit", cal.fit, "input (p_in law) or closures (eta, c_recirc, k0, p_c)")
        ->check(CLI::IsMember({"input", "closures"}))
        ->capture_default_str();
    auto* ct = s_cal->add_option("--type", cal.types, "built-in type letter per --data source (closures)")->delimiter(',');
    auto* cd = s_cal->add_option("--device", cal.devices, "device JSON per --data source (closures)")->delimiter(',');
    ct->excludes(cd);
    cd->excludes(ct);
    s_cal->add_option("--max-evals", cal.max_evals, "objective evaluations per Nelder-Mead run [count]")
        ->capture_default_str();

    OptimizeArgs opt;
    auto* s_opt = app.add_subcommand("optimize", "Nelder-Mead search over gate and nozzle geometry");
    add_device_options(s_opt, opt.cfg);
    add_common_options(s_opt, opt.cfg, "json");
    s_opt->add_option("--objective", opt.objectives,
                      "switching-p-in | max-suction | max-blowing | match-curve (repeat for a weighted sum)")
        ->delimiter(',')
        ->required();
    s_opt->add_option("--weight", opt.weights, "weight per objective [dimensionless]")->delimiter(',');
    s_opt->add_option("--target-p-in-kpa", opt.target_p_in_kpa, "switching input pressure target [kPa]");
    s_opt->add_option("--q-star-lpm", opt.q_star_lpm, "flow rate for max-suction / max-blowing [L/min]")
        ->capture_default_str();
    s_opt->add_option("--match-type", opt.match_type, "built-in type letter whose simulated p_out curve is the target");
    s_opt->add_option("--match-data", opt.match_data, "measurement CSV whose p_out column is the target");
    add_ramp_options(s_opt, opt.ramp);
    s_opt->add_option("--curve-step-lpm", opt.curve_step_lpm, "grid step of a --match-type curve [L/min]")
        ->capture_default_str();
    s_opt->add_option("--w-mm", opt.w_mm, "gate width bounds lo,hi [mm] (default: fixed)")->delimiter(',');
    s_opt->add_option("--t-mm", opt.t_mm, "gate thickness bounds lo,hi [mm] (default: fixed)")->delimiter(',');
    s_opt->add_option("--h-mm", opt.h_mm, "gate height bounds lo,hi [mm] (default: fixed)")->delimiter(',');
    s_opt->add_option("--ane-mm2", opt.a_ne_mm2, "nozzle exit area bounds lo,hi [mm^2] (default: fixed)")
        ->delimiter(',');
    s_opt->add_option("--start", opt.start, "start point w,t,h [mm], a_ne [mm^2] (default: box centre)")
        ->delimiter(',');
    s_opt->add_option("--max-evals", opt.max_evals, "objective evaluation budget [count]")->capture_default_str();
    s_opt->add_option("--simplex-step", opt.simplex_step, "initial simplex edge, fraction of each bound range [dimensionless]")
        ->capture_default_str();

    FrictionArgs fr;
    auto* s_fr = app.add_subcommand("friction", "predict friction coefficients under blowing/suction");
    add_device_options(s_fr, fr.cfg);
    add_common_options(s_fr, fr.cfg, "csv");
    auto* wn = s_fr->add_option("--weight-n", fr.weight_n, "weight load W [N]");
    auto* wg = s_fr->add_option("--weight-gf", fr.weight_gf, "weight load W [gf]");
    wn->excludes(wg);
    wg->excludes(wn);
    s_fr->add_option("--mu0-s", fr.mu0_s, "static friction coefficient without airflow [dimensionless]")
        ->capture_default_str();
    s_fr->add_option("--mu0-k", fr.mu0_k, "kinetic friction coefficient without airflow [dimensionless]")
        ->capture_default_str();
    s_fr->add_option("--a-eff-cm2", fr.a_eff_cm2, "area the output pressure acts on [cm^2]")->capture_default_str();
    s_fr->add_option("--qin-lpm", fr.q_lpm, "comma-separated input flow rates [L/min]")
        ->delimiter(',')
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*s_sim) cmd_simulate(sim, out, err);
        else if (*s_sweep) cmd_sweep(sw, out, err);
        else if (*s_cmp) cmd_compare(cmp, out, err);
        else if (*s_cal) cmd_calibrate(cal, out, err);
        else if (*s_opt) cmd_optimize(opt, out, err);
        else if (*s_fr) cmd_friction(fr, out, err);
        return kOk;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const FitError& e) {
        err << "fit error: " << e.what() << '\n';
        return kFitError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnexpected;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace fdr::cli
