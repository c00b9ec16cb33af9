#pragma once

#include <string>
#include <vector>

namespace fdr {

/// Closure constants of the lumped model. Defaults are the calibrated set
/// used throughout the test and acceptance suites.
struct ModelCoefficients {
    // ejector closure
    double eta = 0.07;        // entrainment efficiency, (0, 1]
    double c_recirc = 0.1;    // recirculation penalty strength, >= 0
    double cd_out = 0.8;      // output-port discharge coefficient

    // network element discharge coefficients
    double cd_gate = 0.8;
    double cd_nozzle = 0.8;
    double cd_channel = 0.8;
    double leak_fraction = 0.02;  // closed-gate leak area / a_ex

    // gate compliance
    double k0 = 1.9e-10;   // m^2/Pa
    double p_c = 8000.0;   // Pa

    // input pressure law p_in = c1 q + c2 q^2 (least-squares fit of the
    // published pressure-flow points)
    double c1 = 79528125.0;                  // Pa s/m^3
    double c2 = 250312500000.0 / 7.0;        // Pa s^2/m^6

    /// Human-readable list of invariant violations; empty when valid.
    std::vector<std::string> violations() const;

    /// Throws std::domain_error when violations() is non-empty.
    void validate() const;
};

}  // namespace fdr
