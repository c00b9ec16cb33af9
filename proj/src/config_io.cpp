#include "fdr/config_io.hpp"

#include <fstream>
#include <set>

#include "fdr/errors.hpp"
#include "fdr/units.hpp"

namespace fdr {

using nlohmann::json;

namespace {

constexpr double kLpm = units::lpm_to_m3s(1.0);

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

double number(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

template <typename Fn>
void if_present(const json& j, const std::string& key, Fn&& fn) {
    if (j.contains(key)) fn(j.at(key));
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

}  // namespace

Device device_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("device config must be a JSON object");
    reject_unknown(j,
                   {"label", "base_type", "a_in_mm2", "a_branch_mm2", "a_ne_mm2", "n_nozzles",
                    "a_ex_mm2", "a_out_mm2", "channel_width_ref_mm", "gate_channel_height_mm",
                    "design_rule_ain_2a", "gate", "material", "fluid"},
                   "device config");

    Device d;
    if (j.contains("base_type")) {
        try {
            d = table1_device(j.at("base_type").get<std::string>());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("device config base_type: ") + e.what());
        }
    } else {
        d.material = Material::from_shore(10.0);
        d.label = "custom";
    }
    if (j.contains("label")) d.label = j.at("label").get<std::string>();

    auto& g = d.geometry;
    const std::string where = "device";
    if_present(j, "a_in_mm2", [&](const json&) { g.a_in = units::mm2_to_m2(number(j, "a_in_mm2", where)); });
    if_present(j, "a_branch_mm2", [&](const json&) { g.a_branch = units::mm2_to_m2(number(j, "a_branch_mm2", where)); });
    if_present(j, "a_ne_mm2", [&](const json&) { g.a_ne = units::mm2_to_m2(number(j, "a_ne_mm2", where)); });
    if_present(j, "a_ex_mm2", [&](const json&) { g.a_ex = units::mm2_to_m2(number(j, "a_ex_mm2", where)); });
    if_present(j, "a_out_mm2", [&](const json&) { g.a_out = units::mm2_to_m2(number(j, "a_out_mm2", where)); });
    if_present(j, "channel_width_ref_mm", [&](const json&) {
        g.channel_width_ref = units::mm_to_m(number(j, "channel_width_ref_mm", where));
    });
    if_present(j, "gate_channel_height_mm", [&](const json&) {
        g.gate_channel_height = units::mm_to_m(number(j, "gate_channel_height_mm", where));
    });
    if_present(j, "n_nozzles", [&](const json& v) {
        if (!v.is_number_integer()) throw ConfigError("device.n_nozzles must be an integer");
        g.n_nozzles = v.get<int>();
    });
    if_present(j, "design_rule_ain_2a", [&](const json& v) {
        if (!v.is_boolean()) throw ConfigError("device.design_rule_ain_2a must be a boolean");
        g.design_rule_ain_2a = v.get<bool>();
    });

    if_present(j, "gate", [&](const json& gj) {
        reject_unknown(gj, {"w_mm", "t_mm", "h_mm"}, "device.gate");
        if (gj.contains("w_mm")) g.gate.w = units::mm_to_m(number(gj, "w_mm", "gate"));
        if (gj.contains("t_mm")) g.gate.t = units::mm_to_m(number(gj, "t_mm", "gate"));
        if (gj.contains("h_mm")) g.gate.h = units::mm_to_m(number(gj, "h_mm", "gate"));
    });

    if_present(j, "material", [&](const json& mj) {
        reject_unknown(mj, {"shore_a", "youngs_modulus_mpa"}, "device.material");
        try {
            if (mj.contains("shore_a")) d.material = Material::from_shore(number(mj, "shore_a", "material"));
        } catch (const std::domain_error& e) {
            throw ConfigError(std::string("device.material: ") + e.what());
        }
        if (mj.contains("youngs_modulus_mpa")) {
            d.material.youngs_modulus = number(mj, "youngs_modulus_mpa", "material") * 1e6;
            if (!(d.material.youngs_modulus > 0.0)) {
                throw ConfigError("device.material.youngs_modulus_mpa must be positive");
            }
        }
    });

    if_present(j, "fluid", [&](const json& fj) {
        reject_unknown(fj, {"rho_in_kg_m3", "rho_kg_m3", "gamma"}, "device.fluid");
        if (fj.contains("rho_in_kg_m3")) d.fluid.rho_in = number(fj, "rho_in_kg_m3", "fluid");
        if (fj.contains("rho_kg_m3")) d.fluid.rho = number(fj, "rho_kg_m3", "fluid");
        if (fj.contains("gamma")) d.fluid.gamma = number(fj, "gamma", "fluid");
        if (!(d.fluid.rho_in > 0.0 && d.fluid.rho > 0.0 && d.fluid.gamma > 1.0)) {
            throw ConfigError("device.fluid requires rho_in > 0, rho > 0 and gamma > 1");
        }
    });

    const auto violations = validate_geometry(g);
    if (!violations.empty()) {
        std::string msg = "invalid device geometry:";
        for (const auto& v : violations) msg += " [" + v.field + "] " + v.message + ";";
        throw ConfigError(msg);
    }
    return d;
}

json device_to_json(const Device& d) {
    const auto& g = d.geometry;
    json j{
        {"label", d.label},
        {"a_in_mm2", units::m2_to_mm2(g.a_in)},
        {"a_branch_mm2", units::m2_to_mm2(g.a_branch)},
        {"a_ne_mm2", units::m2_to_mm2(g.a_ne)},
        {"n_nozzles", g.n_nozzles},
        {"a_ex_mm2", units::m2_to_mm2(g.a_ex)},
        {"a_out_mm2", units::m2_to_mm2(g.a_out)},
        {"channel_width_ref_mm", units::m_to_mm(g.channel_width_ref)},
        {"design_rule_ain_2a", g.design_rule_ain_2a},
        {"gate",
         {{"w_mm", units::m_to_mm(g.gate.w)},
          {"t_mm", units::m_to_mm(g.gate.t)},
          {"h_mm", units::m_to_mm(g.gate.h)}}},
        {"material",
         {{"shore_a", d.material.shore_a}, {"youngs_modulus_mpa", d.material.youngs_modulus * 1e-6}}},
        {"fluid",
         {{"rho_in_kg_m3", d.fluid.rho_in}, {"rho_kg_m3", d.fluid.rho}, {"gamma", d.fluid.gamma}}},
    };
    if (g.gate_channel_height) j["gate_channel_height_mm"] = units::m_to_mm(*g.gate_channel_height);
    return j;
}

Device load_device_file(const std::filesystem::path& path) {
    return device_from_json(read_json_file(path));
}

ModelCoefficients coefficients_from_json(const json& input) {
    const json& j = (input.is_object() && input.contains("coefficients")) ? input.at("coefficients") : input;
    if (!j.is_object()) throw ConfigError("coefficients must be a JSON object");
    reject_unknown(j,
                   {"eta", "c_recirc", "cd_out", "cd_gate", "cd_nozzle", "cd_channel", "leak_fraction",
                    "k0_m2_per_pa", "p_c_kpa", "c1_kpa_per_lpm", "c2_kpa_per_lpm2"},
                   "coefficients");
    ModelCoefficients c;
    const std::string where = "coefficients";
    if (j.contains("eta")) c.eta = number(j, "eta", where);
    if (j.contains("c_recirc")) c.c_recirc = number(j, "c_recirc", where);
    if (j.contains("cd_out")) c.cd_out = number(j, "cd_out", where);
    if (j.contains("cd_gate")) c.cd_gate = number(j, "cd_gate", where);
    if (j.contains("cd_nozzle")) c.cd_nozzle = number(j, "cd_nozzle", where);
    if (j.contains("cd_channel")) c.cd_channel = number(j, "cd_channel", where);
    if (j.contains("leak_fraction")) c.leak_fraction = number(j, "leak_fraction", where);
    if (j.contains("k0_m2_per_pa")) c.k0 = number(j, "k0_m2_per_pa", where);
    if (j.contains("p_c_kpa")) c.p_c = units::kpa_to_pa(number(j, "p_c_kpa", where));
    if (j.contains("c1_kpa_per_lpm")) c.c1 = units::kpa_to_pa(number(j, "c1_kpa_per_lpm", where)) / kLpm;
    if (j.contains("c2_kpa_per_lpm2")) {
        c.c2 = units::kpa_to_pa(number(j, "c2_kpa_per_lpm2", where)) / (kLpm * kLpm);
    }
    const auto v = c.violations();
    if (!v.empty()) {
        std::string msg = "invalid coefficients:";
        for (const auto& s : v) msg += " " + s + ";";
        throw ConfigError(msg);
    }
    return c;
}

json coefficients_to_json(const ModelCoefficients& c) {
    return json{
        {"eta", c.eta},
        {"c_recirc", c.c_recirc},
        {"cd_out", c.cd_out},
        {"cd_gate", c.cd_gate},
        {"cd_nozzle", c.cd_nozzle},
        {"cd_channel", c.cd_channel},
        {"leak_fraction", c.leak_fraction},
        {"k0_m2_per_pa", c.k0},
        {"p_c_kpa", units::pa_to_kpa(c.p_c)},
        {"c1_kpa_per_lpm", units::pa_to_kpa(c.c1) * kLpm},
        {"c2_kpa_per_lpm2", units::pa_to_kpa(c.c2) * kLpm * kLpm},
    };
}

ModelCoefficients load_coefficients_file(const std::filesystem::path& path) {
    return coefficients_from_json(read_json_file(path));
}

}  // namespace fdr
