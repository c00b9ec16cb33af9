#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdr/core.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kConfigError = 2,
    kSolverError = 3,
    kFitError = 4,
};

/// Where the device and coefficients come from, and where output goes.
struct RunConfig {
    std::optional<std::string> type_id;      // built-in type letter
    std::optional<std::string> device_path;  // device JSON
    std::optional<std::string> coeffs_path;  // coefficient / calibration JSON
    std::string out_path;                    // empty = stdout
    std::string format = "csv";              // csv | json
    bool si = false;                         // add SI columns

    /// Exactly one device source. Throws ConfigError otherwise.
    Device device() const;
    ModelCoefficients coefficients() const;
};

/// Runs one command line (args excludes the program name). Output goes to
/// out unless --out is given; diagnostics go to err. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fdr::cli
