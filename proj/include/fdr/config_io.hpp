#pragma once

#include <filesystem>

#include <json.hpp>

#include "fdr/core.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

// Device and coefficient files are JSON. Every dimensional key carries its
// unit as a suffix and is converted to SI on load:
//
//   {
//     "label": "wide-gate",
//     "base_type": "B",                  // optional built-in type to start from
//     "a_in_mm2": 4.0, "a_branch_mm2": 2.0, "a_ne_mm2": 0.4, "n_nozzles": 2,
//     "a_ex_mm2": 6.0, "a_out_mm2": 12.0, "channel_width_ref_mm": 4.0,
//     "gate_channel_height_mm": 2.0, "design_rule_ain_2a": true,
//     "gate": {"w_mm": 8.0, "t_mm": 0.5, "h_mm": 2.0},
//     "material": {"shore_a": 10} | {"shore_a": 10, "youngs_modulus_mpa": 0.4},
//     "fluid": {"rho_in_kg_m3": 1.204, "rho_kg_m3": 1.204, "gamma": 1.4}
//   }
//
// Unknown keys are rejected. Errors throw ConfigError.

Device device_from_json(const nlohmann::json& j);
nlohmann::json device_to_json(const Device& d);
Device load_device_file(const std::filesystem::path& path);

// Coefficient keys: eta, c_recirc, cd_out, cd_gate, cd_nozzle, cd_channel,
// leak_fraction, k0_m2_per_pa, p_c_kpa, c1_kpa_per_lpm, c2_kpa_per_lpm2.
// Missing keys keep their defaults. A calibration report (an object with a
// "coefficients" member) is accepted as well.
ModelCoefficients coefficients_from_json(const nlohmann::json& j);
nlohmann::json coefficients_to_json(const ModelCoefficients& c);
ModelCoefficients load_coefficients_file(const std::filesystem::path& path);

}  // namespace fdr
