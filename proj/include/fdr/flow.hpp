#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/core.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

/// Static pressure p after the input bifurcation, given the input-port
/// pressure p_in (gauge, Pa) and flow q_in (m^3/s):
///   p = (rho/rho_in) p_in + (gamma-1)/(2 gamma) rho (q_in/A_in)^2 (1 - (A_in/(2A))^2)
double bifurcation_pressure(double q_in, double p_in, const FluidProperties& fluid,
                            const DeviceGeometry& g);

/// Partial derivative of bifurcation_pressure with respect to q_in.
double bifurcation_pressure_dq(double q_in, const FluidProperties& fluid, const DeviceGeometry& g);

/// Incompressible orifice law q = sign(dp) cd A sqrt(2|dp|/rho), m^3/s.
double orifice_flow(double dp, double area, double cd, double rho);

/// Calibrated input-port pressure p_in = c1 q + c2 q^2 (Pa).
double input_pressure(double q_in, const ModelCoefficients& coeffs);

enum class ElementKind { orifice, nozzle, channel, bifurcation_branch };

std::string_view to_string(ElementKind kind);

struct FlowNode {
    std::string id;
    double pressure = 0.0;  // gauge, Pa; boundary nodes stay at 0
    bool is_boundary = false;
};

struct FlowElement {
    std::string label;
    ElementKind kind = ElementKind::orifice;
    std::size_t upstream = 0;
    std::size_t downstream = 0;
    double area = 0.0;
    double discharge_coeff = 0.8;
};

/// Steady lumped network of orifice-law elements between pressure nodes.
/// One interior node receives the injected flow; boundary nodes are
/// atmosphere (0 Pa gauge).
class FlowNetwork {
public:
    explicit FlowNetwork(double rho = 1.204) : rho_(rho) {}

    std::size_t add_node(std::string id, bool is_boundary = false);
    std::size_t add_element(std::string label, ElementKind kind, std::string_view upstream,
                            std::string_view downstream, double area, double discharge_coeff);
    void set_injection_node(std::string_view id);

    const std::vector<FlowNode>& nodes() const { return nodes_; }
    const std::vector<FlowElement>& elements() const { return elements_; }
    std::optional<std::size_t> injection_node() const { return injection_; }
    std::optional<std::size_t> find_node(std::string_view id) const;
    std::optional<std::size_t> find_element(std::string_view label) const;
    double rho() const { return rho_; }

private:
    std::size_t require_node(std::string_view id) const;

    double rho_;
    std::vector<FlowNode> nodes_;
    std::vector<FlowElement> elements_;
    std::optional<std::size_t> injection_;
};

struct NetworkSolution {
    std::vector<double> pressures;  // per node, Pa
    std::vector<double> flows;      // per element, m^3/s, positive upstream -> downstream
    double residual_norm = 0.0;     // max node imbalance / injected flow
    int iterations = 0;

    /// Net inflow at every node (injection included). Boundary entries are the
    /// flows leaving to atmosphere with opposite sign.
    std::vector<double> node_imbalance(const FlowNetwork& net, double q_in) const;
};

struct SolveOptions {
    double tolerance = 1e-12;  // max node imbalance / q_in
    int max_iterations = 200;
    int max_step_halvings = 8;
    /// Input-node pressure guess; interior nodes start at half of it. When
    /// unset a series-resistance estimate is used.
    std::optional<double> input_pressure_guess;
};

/// Damped Newton iteration on interior node pressures enforcing mass
/// conservation with q_in injected at the injection node. Dead-end branches
/// carry no flow and take the pressure of the node they hang from.
/// Throws SolverError on non-convergence, std::invalid_argument on a
/// malformed network.
NetworkSolution solve_steady(const FlowNetwork& net, double q_in, const SolveOptions& options = {});

/// Closed-form leak area of a closed gate.
double gate_leak_area(const DeviceGeometry& g, const ModelCoefficients& coeffs);

/// Device flow path: input -> bifurcation -> {chamber (dead end), n nozzles}
/// -> mixing -> gate -> exhaust. The gate element has area max(a_fg, leak).
FlowNetwork assemble_network(const DeviceGeometry& g, double a_fg, const ModelCoefficients& coeffs,
                             const FluidProperties& fluid = FluidProperties::air());

}  // namespace fdr
