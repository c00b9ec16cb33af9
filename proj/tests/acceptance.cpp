// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fdr/calib.hpp"
#include "fdr/cli.hpp"
#include "fdr/core.hpp"
#include "fdr/engine.hpp"
#include "fdr/flow.hpp"
#include "fdr/friction.hpp"
#include "fdr/optimize.hpp"
#include "fdr/units.hpp"

using namespace fdr;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<double> lpm_grid(double from, double to, double step) {
    std::vector<double> q;
    for (double v : sweep_grid(from, to, step)) q.push_back(units::lpm_to_m3s(v));
    return q;
}

Outcome c1_identity() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> uq(0.0, 1e-3), up(0.0, 2e5), ua(1e-8, 1e-4), ur(0.1, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        FluidProperties f;
        f.rho = f.rho_in = ur(rng);
        DeviceGeometry g;
        g.a_branch = ua(rng);
        g.a_in = 2.0 * g.a_branch;
        const double p_in = up(rng);
        const double p = bifurcation_pressure(uq(rng), p_in, f, g);
        worst = std::max(worst, std::abs(p - p_in) / std::max(1.0, std::abs(p_in)));
    }
    o.require(worst <= 1e-12, "worst relative deviation " + fmt(worst));
    o.detail = o.detail.empty() ? "max rel deviation " + fmt(worst) + " over 1000 draws" : o.detail;
    return o;
}

Outcome c2_published_points() {
    Outcome o;
    const FitReport r = fit_input_pressure(builtin_paper_points());
    const double rms = r.find("p_in")->rms;
    o.require(rms <= 2.5e3, "rms " + fmt(rms) + " Pa > 2500 Pa");
    double prev = -1.0;
    bool monotone = true;
    for (double q : lpm_grid(0, 30, 0.01)) {
        const double p = input_pressure(q, r.coefficients);
        monotone = monotone && p > prev;
        prev = p;
    }
    o.require(monotone, "fitted curve not monotone on [0, 30] L/min");
    if (o.ok) o.detail = "rms " + fmt(rms * 1e-3) + " kPa, monotone";
    return o;
}

Outcome c3_modes() {
    Outcome o;
    const Device b = table1_device("B");
    const ModelCoefficients c;
    const OperatingState s10 = solve_operating_point(units::lpm_to_m3s(10), b, c);
    const OperatingState s30 = solve_operating_point(units::lpm_to_m3s(30), b, c);
    o.require(s10.mode == Mode::blowing, "10 L/min mode " + std::string(to_string(s10.mode)));
    o.require(s30.mode == Mode::suction, "30 L/min mode " + std::string(to_string(s30.mode)));
    const RampSpec ramp;
    const SweepResult r = sweep(b, c, ramp.q_start, ramp.q_end, ramp.step);
    o.require(r.states.size() == 301, "grid has " + std::to_string(r.states.size()) + " points");
    o.require(r.sign_changes == 1, std::to_string(r.sign_changes) + " sign changes");
    if (o.ok)
        o.detail = "p_out " + fmt(s10.p_out) + " Pa at 10, " + fmt(s30.p_out) + " Pa at 30 L/min, switch at " +
                   fmt(units::m3s_to_lpm(*r.switching_q)) + " L/min";
    return o;
}

std::map<std::string, OrderingEntry> compare_all(const ModelCoefficients& c) {
    std::map<std::string, OrderingEntry> by_id;
    for (const auto& e : ordering_report(compare_designs(table1_type_ids(), c))) by_id[e.type_id] = e;
    return by_id;
}

void check_chain(Outcome& o, const std::map<std::string, OrderingEntry>& m, const std::string& chain,
                 const std::function<double(const OrderingEntry&)>& key, const std::string& name) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const std::string a(1, chain[i]), b(1, chain[i + 1]);
        const double ka = key(m.at(a)), kb = key(m.at(b));
        o.require(ka > kb, name + ": " + a + " (" + fmt(ka) + ") !> " + b + " (" + fmt(kb) + ")");
    }
}

Outcome c4_switching_orderings() {
    Outcome o;
    const auto m = compare_all(ModelCoefficients{});
    for (const auto& [id, e] : m) o.require(e.switching_p_in.has_value(), id + " never switches");
    if (!o.ok) return o;
    const auto key = [](const OrderingEntry& e) { return *e.switching_p_in; };
    for (const char* chain : {"ABC", "EBD", "BGF", "IBH", "KJB"}) check_chain(o, m, chain, key, "switching p_in");
    if (o.ok) {
        o.detail = "switching p_in [kPa]:";
        for (const auto& [id, e] : m) o.detail += " " + id + "=" + fmt(*e.switching_p_in * 1e-3);
    }
    return o;
}

Outcome c5_capacity() {
    Outcome o;
    const ModelCoefficients c;
    const auto m = compare_all(c);
    const auto key = [](const OrderingEntry& e) { return e.max_blow; };
    for (const char* chain : {"ABC", "EBD", "KJB"}) check_chain(o, m, chain, key, "max blowing");

    const double q30 = units::lpm_to_m3s(30);
    auto suck = [&](const char* id, const ModelCoefficients& k) {
        return -solve_operating_point(q30, table1_device(id), k).p_out;
    };
    ModelCoefficients flat = c;
    flat.c_recirc = 0.0;
    const double b0 = suck("B", flat), a0 = suck("A", flat);
    const double a1 = suck("A", c), c1 = suck("C", c);
    o.require(b0 > a0, "no penalty: suction B " + fmt(b0) + " !> A " + fmt(a0));
    o.require(a1 > c1, "with penalty: suction A " + fmt(a1) + " !> C " + fmt(c1));
    if (o.ok)
        o.detail = "max blow A/B/C " + fmt(m.at("A").max_blow) + "/" + fmt(m.at("B").max_blow) + "/" +
                   fmt(m.at("C").max_blow) + " Pa; suction@30 B>A " + fmt(b0) + ">" + fmt(a0) + ", A>C " + fmt(a1) +
                   ">" + fmt(c1) + " Pa";
    return o;
}

Outcome c6_friction() {
    Outcome o;
    const Device b = table1_device("B");
    const ModelCoefficients c;
    const std::vector<double> q = lpm_grid(0, 30, 10);  // 0, 10, 20, 30
    std::vector<double> increase;
    for (double gf : {16.0, 100.0, 200.0}) {
        const double w = units::gf_to_n(gf);
        const auto pts = friction_curve(b, c, 0.5, 0.4, w, kDefaultContactArea, q);
        for (int k = 0; k < 2; ++k) {
            auto mu = [&](int i) { return k == 0 ? pts[i].prediction.mu_s : pts[i].prediction.mu_k; };
            const std::string tag = (k == 0 ? "mu_s" : "mu_k") + std::string(" at W=") + fmt(w) + " N";
            o.require(mu(1) < mu(0) && mu(0) < mu(2) && mu(2) < mu(3), tag + " ordering broken");
        }
        increase.push_back((pts[3].prediction.mu_s - pts[0].prediction.mu_s) / pts[0].prediction.mu_s);
    }
    o.require(increase[0] > increase[1] && increase[1] > increase[2], "relative increase not decreasing in W");
    const double ratio = increase[1] / increase[2];
    o.require(std::abs(ratio - 2.0) <= 1e-9, "0.981/1.96 N ratio " + fmt(ratio));
    if (o.ok)
        o.detail = "relative increase " + fmt(increase[0]) + " > " + fmt(increase[1]) + " > " + fmt(increase[2]) +
                   ", ratio " + fmt(ratio);
    return o;
}

std::string sweep_csv(const std::string& id, const char* workers) {
    if (workers) setenv("FDR_WORKERS", workers, 1);
    else unsetenv("FDR_WORKERS");
    std::ostringstream out, err;
    const int code = cli::run({"sweep", "--type", id, "--si"}, out, err);
    unsetenv("FDR_WORKERS");
    return code == 0 ? out.str() : "exit " + std::to_string(code);
}

Outcome c7_conservation_determinism() {
    Outcome o;
    const ModelCoefficients c;
    const RampSpec ramp;
    double worst = 0.0;
    for (const auto& id : table1_type_ids()) {
        const Device d = table1_device(id);
        for (const OperatingState& s : sweep(d, c, ramp.q_start, ramp.q_end, ramp.step).states) {
            if (s.q_in == 0.0) continue;
            const FlowNetwork net = assemble_network(d.geometry, s.a_fg, c, d.fluid);
            const auto imb = s.network.node_imbalance(net, s.q_in);
            for (std::size_t n = 0; n < net.nodes().size(); ++n)
                if (!net.nodes()[n].is_boundary) worst = std::max(worst, std::abs(imb[n]) / s.q_in);
        }
    }
    o.require(worst <= 1e-9, "worst node imbalance " + fmt(worst));
    for (const char* id : {"B", "F", "K"}) {
        const std::string first = sweep_csv(id, nullptr);
        o.require(first.rfind("q_in_lpm,", 0) == 0, std::string("sweep ") + id + " failed");
        o.require(first == sweep_csv(id, nullptr), std::string("repeat sweep of ") + id + " differs");
        o.require(first == sweep_csv(id, "1"), std::string("1-worker sweep of ") + id + " differs");
        o.require(first == sweep_csv(id, "8"), std::string("8-worker sweep of ") + id + " differs");
    }
    if (o.ok) o.detail = "max imbalance " + fmt(worst) + "; CSV identical across repeats and 1/8 workers";
    return o;
}

Outcome c8_oracles() {
    Outcome o;
    FlowNetwork net;
    net.add_node("in");
    net.add_node("mid");
    net.add_node("atm", true);
    net.add_element("first", ElementKind::orifice, "in", "mid", 1e-6, 0.8);
    net.add_element("second", ElementKind::orifice, "mid", "atm", 1e-6, 0.8);
    net.set_injection_node("in");
    const double q = 1e-4, rho = FluidProperties{}.rho;
    const double drop = 0.5 * rho * std::pow(q / (0.8 * 1e-6), 2);
    const NetworkSolution s = solve_steady(net, q);
    const double e_mid = rel(s.pressures[1], drop);
    o.require(e_mid <= 1e-9, "series midpoint error " + fmt(e_mid));

    const FluidProperties f;
    DeviceGeometry g;
    g.a_in = 4e-6;
    g.a_branch = 1.5e-6;
    g.design_rule_ain_2a = false;
    double e_dq = 0.0;
    for (double qq : {1e-5, 1e-4, 3e-4, 5e-4}) {
        const double h = qq * 1e-5;
        const double fd = (bifurcation_pressure(qq + h, 1e4, f, g) - bifurcation_pressure(qq - h, 1e4, f, g)) / (2 * h);
        e_dq = std::max(e_dq, rel(bifurcation_pressure_dq(qq, f, g), fd));
    }
    o.require(e_dq <= 1e-6, "derivative error " + fmt(e_dq));

    // constant compliance, linear input law: the fixed point has a closed form
    Device d = table1_device("B");
    d.geometry.a_branch = 1.5e-6;
    d.geometry.design_rule_ain_2a = false;
    d.geometry.gate_channel_height = 1.0;
    ModelCoefficients c;
    c.c1 = 1e8;
    c.c2 = 0.0;
    c.p_c = 0.0;
    c.k0 = 1e-10;
    const double qf = units::lpm_to_m3s(20);
    const DeviceGeometry& dg = d.geometry;
    const double K = (d.fluid.gamma - 1.0) / (2.0 * d.fluid.gamma) * d.fluid.rho / (dg.a_in * dg.a_in) *
                     (1.0 - std::pow(dg.a_in / (2.0 * dg.a_branch), 2));
    const double p = c.c1 * qf + K * qf * qf;
    const double a = c.k0 * p;
    const double sh = a / dg.gate.w;
    const double v_back = (1.0 - sh) * qf / (c.cd_out * dg.a_out);
    const double v_jet = qf / dg.n_nozzles / dg.a_ne;
    const double R = 1.0 / (1.0 + c.c_recirc * std::pow((dg.gate.w - dg.channel_width_ref) / dg.channel_width_ref, 2));
    const double p_out = (1.0 - sh) * 0.5 * d.fluid.rho * v_back * v_back -
                         sh * c.eta * 0.5 * d.fluid.rho * v_jet * v_jet * std::min(1.0, a / dg.a_ex) * R;
    const OperatingState st = solve_operating_point(qf, d, c);
    const double e_fp = std::max({rel(st.p_chamber, p), rel(st.a_fg, a), rel(st.p_out, p_out)});
    o.require(e_fp <= 1e-9, "fixed point error " + fmt(e_fp));
    if (o.ok)
        o.detail = "midpoint " + fmt(e_mid) + ", dp/dq " + fmt(e_dq) + ", fixed point " + fmt(e_fp) + " (relative)";
    return o;
}

Outcome c9_optimizer() {
    Outcome o;
    const Device b = table1_device("B");
    const ModelCoefficients c;
    ObjectiveTerm t{ObjectiveKind::match_curve};
    t.curve_q = lpm_grid(0, 30, 1);
    for (double q : t.curve_q) t.curve_p_out.push_back(solve_operating_point(q, b, c).p_out);
    DesignObjective obj;
    obj.terms.push_back(t);

    const GeometryVector truth = geometry_vector(b.geometry);
    GeometryBounds box{truth, truth};
    box.lower[0] = 5e-3, box.upper[0] = 11e-3;
    box.lower[1] = 0.35e-3, box.upper[1] = 0.7e-3;
    box.lower[2] = 1.5e-3, box.upper[2] = 2.5e-3;
    GeometryVector start = truth;
    for (int i = 0; i < 3; ++i) start[i] *= 1.2;
    NelderMeadOptions opts;
    opts.max_evals = 400;
    const GeometryOptimum r = optimize_geometry(obj, box, c, b, start, 0.1, opts);

    const char* names[] = {"w", "t", "h"};
    std::string errs;
    for (int i = 0; i < 3; ++i) {
        const double e = rel(r.x[i], truth[i]);
        errs += std::string(i ? ", " : "") + names[i] + " " + fmt(100 * e) + "%";
        o.require(e <= 0.05, std::string(names[i]) + " off by " + fmt(100 * e) + "%");
    }
    o.require(r.evaluations <= 400, std::to_string(r.evaluations) + " evaluations");
    o.detail = (o.ok ? "" : o.detail + " | ") + errs + " after " + std::to_string(r.evaluations) + " evaluations";
    return o;
}

Outcome c10_calibration() {
    Outcome o;
    const ModelCoefficients truth;
    std::vector<ClosureDataset> sets;
    for (const char* id : {"A", "B", "C"}) {
        const Device d = table1_device(id);
        sets.push_back({d, simulate_measurements(d, truth, lpm_grid(0, 30, 1), id)});
    }
    ModelCoefficients start = truth;
    start.eta *= 1.1;
    start.c_recirc *= 0.9;
    start.k0 *= 0.93;
    start.p_c *= 1.08;
    const FitReport r = fit_closures(sets, start);
    const std::pair<const char*, std::pair<double, double>> pairs[] = {
        {"eta", {r.coefficients.eta, truth.eta}},
        {"c_recirc", {r.coefficients.c_recirc, truth.c_recirc}},
        {"k0", {r.coefficients.k0, truth.k0}},
        {"p_c", {r.coefficients.p_c, truth.p_c}},
    };
    std::string errs;
    for (const auto& [name, v] : pairs) {
        const double e = rel(v.first, v.second);
        errs += std::string(errs.empty() ? "" : ", ") + name + " " + fmt(100 * e) + "%";
        o.require(e <= 0.02, std::string(name) + " off by " + fmt(100 * e) + "%");
    }
    o.detail = (o.ok ? "" : o.detail + " | ") + errs;
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        std::function<Outcome()> run;
        double time_limit;  // s, 0 = none
    };
    const std::vector<Criterion> all = {
        {1, c1_identity, 1.0},
        {2, c2_published_points, 1.0},
        {3, c3_modes, 5.0},
        {4, c4_switching_orderings, 30.0},
        {5, c5_capacity, 0.0},
        {6, c6_friction, 0.0},
        {7, c7_conservation_determinism, 0.0},
        {8, c8_oracles, 0.0},
        {9, c9_optimizer, 60.0},
        {10, c10_calibration, 0.0},
    };
    int failed = 0;
    for (const auto& cr : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (cr.time_limit > 0.0 && dt >= cr.time_limit) {
            o.ok = false;
            o.detail += "; runtime " + fmt(dt) + " s over the " + fmt(cr.time_limit) + " s limit";
        }
        failed += !o.ok;
        std::printf("%s criterion %d: %s (%.3f s)\n", o.ok ? "PASS" : "FAIL", cr.id, o.detail.c_str(), dt);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
