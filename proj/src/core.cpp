#include "fdr/core.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "fdr/units.hpp"

namespace fdr {

namespace {

struct TableRow {
    char id;
    double shore_a;
    double a_ne_mm2;
    double w_mm;
    double t_mm;
    double h_mm;
};

// Type B is the nominal design; every other row differs from it in one column.
constexpr std::array<TableRow, 11> kTable1{{
    {'A', 10, 0.40, 6, 0.5, 2.0},
    {'B', 10, 0.40, 8, 0.5, 2.0},
    {'C', 10, 0.40, 10, 0.5, 2.0},
    {'D', 10, 0.40, 8, 0.4, 2.0},
    {'E', 10, 0.40, 8, 0.6, 2.0},
    {'F', 10, 0.40, 8, 0.5, 1.8},
    {'G', 10, 0.40, 8, 0.5, 1.9},
    {'H', 10, 0.32, 8, 0.5, 2.0},
    {'I', 10, 0.48, 8, 0.5, 2.0},
    {'J', 20, 0.40, 8, 0.5, 2.0},
    {'K', 30, 0.40, 8, 0.5, 2.0},
}};

}  // namespace

double shore_to_modulus(double shore_a) {
    if (!(shore_a > 0.0 && shore_a < 100.0)) {
        throw std::domain_error("shore_to_modulus: hardness must lie in (0, 100), got " +
                                std::to_string(shore_a));
    }
    const double e_mpa =
        0.0981 * (56.0 + 7.66 * shore_a) / (0.137505 * (254.0 - 2.54 * shore_a));
    return e_mpa * 1e6;
}

Material Material::from_shore(double shore_a) {
    return Material{shore_a, shore_to_modulus(shore_a)};
}

const std::vector<std::string>& table1_type_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& row : kTable1) out.emplace_back(1, row.id);
        return out;
    }();
    return ids;
}

Device table1_device(std::string_view type_id) {
    for (const auto& row : kTable1) {
        if (type_id.size() == 1 && type_id[0] == row.id) {
            Device d;
            d.label = std::string(1, row.id);
            d.geometry.a_ne = units::mm2_to_m2(row.a_ne_mm2);
            d.geometry.gate = FlapGateGeometry{units::mm_to_m(row.w_mm), units::mm_to_m(row.t_mm),
                                               units::mm_to_m(row.h_mm)};
            d.material = Material::from_shore(row.shore_a);
            return d;
        }
    }
    throw std::domain_error("unknown device type '" + std::string(type_id) +
                            "'; valid types are A, B, C, D, E, F, G, H, I, J, K");
}

std::vector<Violation> validate_geometry(const DeviceGeometry& g) {
    std::vector<Violation> out;
    auto positive = [&out](const char* field, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            out.push_back({field, std::string(field) + " must be positive and finite"});
        }
    };
    positive("a_in", g.a_in);
    positive("a_branch", g.a_branch);
    positive("a_ne", g.a_ne);
    positive("a_ex", g.a_ex);
    positive("a_out", g.a_out);
    positive("channel_width_ref", g.channel_width_ref);
    if (g.n_nozzles < 1) out.push_back({"n_nozzles", "n_nozzles must be at least 1"});
    positive("w", g.gate.w);
    positive("t", g.gate.t);
    positive("h", g.gate.h);
    if (g.gate_channel_height) positive("gate_channel_height", *g.gate_channel_height);
    if (g.gate.t > 0.0 && !(g.gate.t < g.gate.w)) {
        out.push_back({"t", "gate thickness t must be smaller than width w"});
    }
    if (g.gate.t > 0.0 && !(g.gate.t < g.gate.h)) {
        out.push_back({"t", "gate thickness t must be smaller than height h"});
    }
    if (g.design_rule_ain_2a && g.a_in > 0.0 && g.a_branch > 0.0) {
        if (std::abs(g.a_in - 2.0 * g.a_branch) > 1e-12 * g.a_in) {
            out.push_back({"a_in", "design rule A_in = 2A violated (a_in != 2 * a_branch)"});
        }
    }
    return out;
}

}  // namespace fdr
