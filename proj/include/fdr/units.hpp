#pragma once

// Display-unit conversions. Everything inside the library is SI; these are
// used only at the config / CLI / report boundary.

namespace fdr::units {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

constexpr double lpm_to_m3s(double lpm) { return lpm / 60000.0; }
constexpr double m3s_to_lpm(double m3s) { return m3s * 60000.0; }

constexpr double kpa_to_pa(double kpa) { return kpa * 1000.0; }
constexpr double pa_to_kpa(double pa) { return pa / 1000.0; }

constexpr double mm_to_m(double mm) { return mm * 1e-3; }
constexpr double m_to_mm(double m) { return m * 1e3; }

constexpr double mm2_to_m2(double mm2) { return mm2 * 1e-6; }
constexpr double m2_to_mm2(double m2) { return m2 * 1e6; }

constexpr double gf_to_n(double gf) { return gf * 1e-3 * kStandardGravity; }

}  // namespace fdr::units
