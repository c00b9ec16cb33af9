#include "fdr/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "fdr/errors.hpp"

namespace fdr {

double bifurcation_pressure(double q_in, double p_in, const FluidProperties& fluid,
                            const DeviceGeometry& g) {
    const double v_in = q_in / g.a_in;
    const double area_ratio = g.a_in / (2.0 * g.a_branch);
    return (fluid.rho / fluid.rho_in) * p_in +
           (fluid.gamma - 1.0) / (2.0 * fluid.gamma) * fluid.rho * v_in * v_in *
               (1.0 - area_ratio * area_ratio);
}

double bifurcation_pressure_dq(double q_in, const FluidProperties& fluid, const DeviceGeometry& g) {
    const double area_ratio = g.a_in / (2.0 * g.a_branch);
    return (fluid.gamma - 1.0) / (2.0 * fluid.gamma) * fluid.rho * 2.0 * q_in / (g.a_in * g.a_in) *
           (1.0 - area_ratio * area_ratio);
}

double orifice_flow(double dp, double area, double cd, double rho) {
    const double q = cd * area * std::sqrt(2.0 * std::abs(dp) / rho);
    return dp < 0.0 ? -q : q;
}

double input_pressure(double q_in, const ModelCoefficients& coeffs) {
    return coeffs.c1 * q_in + coeffs.c2 * q_in * q_in;
}

std::string_view to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::orifice: return "orifice";
        case ElementKind::nozzle: return "nozzle";
        case ElementKind::channel: return "channel";
        case ElementKind::bifurcation_branch: return "bifurcation-branch";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// FlowNetwork
// ---------------------------------------------------------------------------

std::size_t FlowNetwork::add_node(std::string id, bool is_boundary) {
    if (find_node(id)) throw std::invalid_argument("duplicate node id '" + id + "'");
    nodes_.push_back(FlowNode{std::move(id), 0.0, is_boundary});
    return nodes_.size() - 1;
}

std::size_t FlowNetwork::add_element(std::string label, ElementKind kind, std::string_view upstream,
                                     std::string_view downstream, double area,
                                     double discharge_coeff) {
    if (!(area > 0.0)) throw std::invalid_argument("element '" + label + "': area must be positive");
    if (!(discharge_coeff > 0.0 && discharge_coeff <= 1.0)) {
        throw std::invalid_argument("element '" + label + "': discharge coefficient must lie in (0, 1]");
    }
    const auto up = require_node(upstream);
    const auto down = require_node(downstream);
    if (up == down) throw std::invalid_argument("element '" + label + "' connects a node to itself");
    elements_.push_back(FlowElement{std::move(label), kind, up, down, area, discharge_coeff});
    return elements_.size() - 1;
}

void FlowNetwork::set_injection_node(std::string_view id) {
    const auto idx = require_node(id);
    if (nodes_[idx].is_boundary) throw std::invalid_argument("injection node must be interior");
    injection_ = idx;
}

std::optional<std::size_t> FlowNetwork::find_node(std::string_view id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> FlowNetwork::find_element(std::string_view label) const {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (elements_[i].label == label) return i;
    }
    return std::nullopt;
}

std::size_t FlowNetwork::require_node(std::string_view id) const {
    if (auto idx = find_node(id)) return *idx;
    throw std::invalid_argument("unknown node id '" + std::string(id) + "'");
}

std::vector<double> NetworkSolution::node_imbalance(const FlowNetwork& net, double q_in) const {
    std::vector<double> net_in(net.nodes().size(), 0.0);
    if (auto inj = net.injection_node()) net_in[*inj] += q_in;
    const auto& elems = net.elements();
    for (std::size_t e = 0; e < elems.size(); ++e) {
        net_in[elems[e].upstream] -= flows[e];
        net_in[elems[e].downstream] += flows[e];
    }
    return net_in;
}

// ---------------------------------------------------------------------------
// Steady solver
// ---------------------------------------------------------------------------

namespace {

struct Reduction {
    std::vector<bool> element_active;
    std::vector<bool> node_pruned;
    // (pruned node, node it hangs from), in pruning order
    std::vector<std::pair<std::size_t, std::size_t>> pruned_chain;
};

// Interior nodes with a single connection and no injection carry no steady
// flow; peel them off repeatedly so only flow-carrying paths remain.
Reduction prune_dead_ends(const FlowNetwork& net) {
    const auto& nodes = net.nodes();
    const auto& elems = net.elements();
    Reduction r{std::vector<bool>(elems.size(), true), std::vector<bool>(nodes.size(), false), {}};

    std::vector<int> degree(nodes.size(), 0);
    for (const auto& e : elems) {
        ++degree[e.upstream];
        ++degree[e.downstream];
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            if (r.node_pruned[n] || nodes[n].is_boundary || net.injection_node() == n) continue;
            if (degree[n] > 1) continue;
            r.node_pruned[n] = true;
            changed = true;
            if (degree[n] == 0) {
                r.pruned_chain.emplace_back(n, n);
                continue;
            }
            for (std::size_t e = 0; e < elems.size(); ++e) {
                if (!r.element_active[e]) continue;
                if (elems[e].upstream != n && elems[e].downstream != n) continue;
                const auto other = elems[e].upstream == n ? elems[e].downstream : elems[e].upstream;
                r.element_active[e] = false;
                --degree[n];
                --degree[other];
                r.pruned_chain.emplace_back(n, other);
                break;
            }
        }
    }
    return r;
}

double element_conductance(const FlowElement& e, double rho) {
    return e.discharge_coeff * e.area * std::sqrt(2.0 / rho);
}

}  // namespace

NetworkSolution solve_steady(const FlowNetwork& net, double q_in, const SolveOptions& options) {
    if (!(q_in >= 0.0)) throw std::invalid_argument("solve_steady: q_in must be >= 0");
    if (!net.injection_node()) throw std::invalid_argument("solve_steady: network has no injection node");

    const auto& nodes = net.nodes();
    const auto& elems = net.elements();
    const double rho = net.rho();
    const std::size_t inj = *net.injection_node();

    NetworkSolution sol;
    sol.pressures.assign(nodes.size(), 0.0);
    sol.flows.assign(elems.size(), 0.0);
    if (q_in == 0.0) return sol;

    const Reduction red = prune_dead_ends(net);

    // Interior unknowns and their connectivity to atmosphere.
    std::vector<long> unknown_of(nodes.size(), -1);
    std::vector<std::size_t> unknowns;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (!nodes[n].is_boundary && !red.node_pruned[n]) {
            unknown_of[n] = static_cast<long>(unknowns.size());
            unknowns.push_back(n);
        }
    }
    {
        std::vector<bool> reached(nodes.size(), false);
        std::vector<std::size_t> stack;
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            if (nodes[n].is_boundary) {
                reached[n] = true;
                stack.push_back(n);
            }
        }
        while (!stack.empty()) {
            const auto n = stack.back();
            stack.pop_back();
            for (std::size_t e = 0; e < elems.size(); ++e) {
                if (!red.element_active[e]) continue;
                std::size_t other;
                if (elems[e].upstream == n) other = elems[e].downstream;
                else if (elems[e].downstream == n) other = elems[e].upstream;
                else continue;
                if (!reached[other]) {
                    reached[other] = true;
                    stack.push_back(other);
                }
            }
        }
        for (auto n : unknowns) {
            if (!reached[n]) {
                throw std::invalid_argument("solve_steady: node '" + nodes[n].id +
                                            "' has no flow path to a boundary node");
            }
        }
    }

    // Initial guess: half the input pressure, from the caller or from a
    // series-resistance estimate over the active elements.
    double p_guess = 0.0;
    if (options.input_pressure_guess && *options.input_pressure_guess > 0.0) {
        p_guess = *options.input_pressure_guess;
    } else {
        for (std::size_t e = 0; e < elems.size(); ++e) {
            if (!red.element_active[e]) continue;
            const double v = q_in / element_conductance(elems[e], rho);
            p_guess += v * v;
        }
    }
    const double dp_floor = std::max(1e-12 * p_guess, 1e-300);

    const auto n_unknown = static_cast<Eigen::Index>(unknowns.size());
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n_unknown, 0.5 * p_guess);

    auto pressure_of = [&](const Eigen::VectorXd& v, std::size_t node) {
        return unknown_of[node] < 0 ? 0.0 : v[unknown_of[node]];
    };
    auto residual = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n_unknown);
        if (unknown_of[inj] >= 0) r[unknown_of[inj]] += q_in;
        for (std::size_t e = 0; e < elems.size(); ++e) {
            if (!red.element_active[e]) continue;
            const auto& el = elems[e];
            const double q = orifice_flow(pressure_of(v, el.upstream) - pressure_of(v, el.downstream),
                                          el.area, el.discharge_coeff, rho);
            if (unknown_of[el.upstream] >= 0) r[unknown_of[el.upstream]] -= q;
            if (unknown_of[el.downstream] >= 0) r[unknown_of[el.downstream]] += q;
        }
        return r;
    };
    auto norm = [&](const Eigen::VectorXd& r) { return r.lpNorm<Eigen::Infinity>() / q_in; };

    Eigen::VectorXd r = residual(x);
    double res = norm(r);
    int iter = 0;
    while (res > options.tolerance) {
        if (iter >= options.max_iterations) {
            throw SolverError("network solve did not converge after " + std::to_string(iter) +
                                  " iterations (relative residual " + std::to_string(res) + ")",
                              res);
        }
        ++iter;

        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_unknown, n_unknown);
        for (std::size_t e = 0; e < elems.size(); ++e) {
            if (!red.element_active[e]) continue;
            const auto& el = elems[e];
            const double dp = pressure_of(x, el.upstream) - pressure_of(x, el.downstream);
            const double g = element_conductance(el, rho) / (2.0 * std::sqrt(std::max(std::abs(dp), dp_floor)));
            const long u = unknown_of[el.upstream];
            const long d = unknown_of[el.downstream];
            // r[u] -= q, r[d] += q, dq/dpu = g, dq/dpd = -g
            if (u >= 0) {
                jac(u, u) -= g;
                if (d >= 0) jac(u, d) += g;
            }
            if (d >= 0) {
                jac(d, d) -= g;
                if (u >= 0) jac(d, u) += g;
            }
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
        if (!step.allFinite()) {
            throw SolverError("network Jacobian is singular", res);
        }

        double lambda = 1.0;
        Eigen::VectorXd trial = x + step;
        Eigen::VectorXd r_trial = residual(trial);
        double res_trial = norm(r_trial);
        for (int h = 0; h < options.max_step_halvings && !(res_trial < res); ++h) {
            lambda *= 0.5;
            trial = x + lambda * step;
            r_trial = residual(trial);
            res_trial = norm(r_trial);
        }
        x = std::move(trial);
        r = std::move(r_trial);
        res = res_trial;
    }

    for (std::size_t n = 0; n < nodes.size(); ++n) sol.pressures[n] = pressure_of(x, n);
    // Pruned nodes inherit pressure from their anchor, innermost first.
    for (auto it = red.pruned_chain.rbegin(); it != red.pruned_chain.rend(); ++it) {
        const auto [node, anchor] = *it;
        sol.pressures[node] = node == anchor ? 0.0 : sol.pressures[anchor];
    }
    for (std::size_t e = 0; e < elems.size(); ++e) {
        if (!red.element_active[e]) continue;
        const auto& el = elems[e];
        sol.flows[e] = orifice_flow(sol.pressures[el.upstream] - sol.pressures[el.downstream], el.area,
                                    el.discharge_coeff, rho);
    }
    sol.residual_norm = res;
    sol.iterations = iter;
    return sol;
}

// ---------------------------------------------------------------------------
// Device network
// ---------------------------------------------------------------------------

double gate_leak_area(const DeviceGeometry& g, const ModelCoefficients& coeffs) {
    return coeffs.leak_fraction * g.a_ex;
}

FlowNetwork assemble_network(const DeviceGeometry& g, double a_fg, const ModelCoefficients& coeffs,
                             const FluidProperties& fluid) {
    if (!(a_fg >= 0.0)) throw std::invalid_argument("assemble_network: a_fg must be >= 0");
    FlowNetwork net(fluid.rho);
    net.add_node("input");
    net.add_node("bifurcation");
    net.add_node("chamber");
    net.add_node("mixing");
    net.add_node("exhaust", true);
    net.set_injection_node("input");

    net.add_element("input-channel", ElementKind::channel, "input", "bifurcation", g.a_in, coeffs.cd_channel);
    net.add_element("chamber-branch", ElementKind::bifurcation_branch, "bifurcation", "chamber", g.a_branch,
                    coeffs.cd_channel);
    for (int i = 0; i < g.n_nozzles; ++i) {
        net.add_element("nozzle-" + std::to_string(i + 1), ElementKind::nozzle, "bifurcation", "mixing", g.a_ne,
                        coeffs.cd_nozzle);
    }
    net.add_element("gate", ElementKind::orifice, "mixing", "exhaust", std::max(a_fg, gate_leak_area(g, coeffs)),
                    coeffs.cd_gate);
    return net;
}

}  // namespace fdr
