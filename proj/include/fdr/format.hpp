#pragma once

#include <cstdio>
#include <string>

namespace fdr {

/// Fixed-width text for CSV/report output: 9 significant digits, %g style,
/// negative zero printed as 0.
inline std::string format_sig(double v, int digits = 9) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v == 0.0 ? 0.0 : v);
    return buf;
}

}  // namespace fdr
