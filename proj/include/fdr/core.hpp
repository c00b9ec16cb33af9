#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fdr {

/// Air properties on both sides of the input bifurcation.
struct FluidProperties {
    double rho_in = 1.204;  // kg/m^3 at the input port
    double rho = 1.204;     // kg/m^3 downstream of the bifurcation
    double gamma = 1.4;     // specific heat ratio

    static FluidProperties air() { return {}; }
};

struct Material {
    double shore_a = 10.0;
    double youngs_modulus = 0.0;  // Pa

    /// Material with modulus derived from hardness via shore_to_modulus.
    static Material from_shore(double shore_a);
};

/// Flap gate: two cantilevered walls of width w, thickness t and height h.
struct FlapGateGeometry {
    double w = 8e-3;    // m
    double t = 0.5e-3;  // m
    double h = 2e-3;    // m
};

struct DeviceGeometry {
    double a_in = 4e-6;       // input-port cross-section, m^2
    double a_branch = 2e-6;   // post-bifurcation channel cross-section (A), m^2
    double a_ne = 0.4e-6;     // nozzle exit area per nozzle, m^2
    int n_nozzles = 2;
    double a_ex = 6e-6;       // exhaust port, m^2
    double a_out = 12e-6;     // output port, m^2
    FlapGateGeometry gate{};
    double channel_width_ref = 4e-3;  // recirculation reference width, m
    /// Height of the channel the gate opens into; the gate height when unset.
    std::optional<double> gate_channel_height;
    /// Device declares the A_in = 2A bifurcation design rule.
    bool design_rule_ain_2a = true;

    double total_nozzle_area() const { return n_nozzles * a_ne; }
    double channel_height() const { return gate_channel_height.value_or(gate.h); }
};

struct Device {
    std::string label;
    DeviceGeometry geometry{};
    Material material{};
    FluidProperties fluid{};
};

/// Gent relation between Shore A hardness and Young's modulus (Pa).
/// Throws std::domain_error unless 0 < shore_a < 100.
double shore_to_modulus(double shore_a);

/// Row of the published parameter table (letters A..K); unpublished
/// dimensions take the DeviceGeometry defaults.
/// Throws std::domain_error for an unknown letter.
Device table1_device(std::string_view type_id);

/// Letters accepted by table1_device, in table order.
const std::vector<std::string>& table1_type_ids();

struct Violation {
    std::string field;
    std::string message;
};

/// Checks the DeviceGeometry invariants. Never throws.
std::vector<Violation> validate_geometry(const DeviceGeometry& g);

}  // namespace fdr
