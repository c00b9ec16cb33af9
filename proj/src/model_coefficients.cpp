#include "fdr/model_coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace fdr {

std::vector<std::string> ModelCoefficients::violations() const {
    std::vector<std::string> out;
    auto check = [&out](bool ok, double v, const char* msg) {
        if (!ok || !std::isfinite(v)) out.emplace_back(msg);
    };
    check(eta > 0.0 && eta <= 1.0, eta, "eta must lie in (0, 1]");
    check(c_recirc >= 0.0, c_recirc, "c_recirc must be >= 0");
    check(cd_out > 0.0 && cd_out <= 1.0, cd_out, "cd_out must lie in (0, 1]");
    check(cd_gate > 0.0 && cd_gate <= 1.0, cd_gate, "cd_gate must lie in (0, 1]");
    check(cd_nozzle > 0.0 && cd_nozzle <= 1.0, cd_nozzle, "cd_nozzle must lie in (0, 1]");
    check(cd_channel > 0.0 && cd_channel <= 1.0, cd_channel, "cd_channel must lie in (0, 1]");
    check(leak_fraction > 0.0 && leak_fraction <= 1.0, leak_fraction,
          "leak_fraction must lie in (0, 1]");
    check(k0 > 0.0, k0, "k0 must be positive");
    check(p_c >= 0.0, p_c, "p_c must be >= 0");
    check(c1 >= 0.0, c1, "c1 must be >= 0");
    check(c2 >= 0.0, c2, "c2 must be >= 0");
    return out;
}

void ModelCoefficients::validate() const {
    const auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid model coefficients:";
    for (const auto& s : v) msg += " " + s + ";";
    throw std::domain_error(msg);
}

}  // namespace fdr
