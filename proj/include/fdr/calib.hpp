#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/core.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

/// One measured operating point, SI units. Only q_in is mandatory.
struct MeasurementRow {
    double q_in = 0.0;               // m^3/s
    std::optional<double> p_in;      // Pa
    std::optional<double> p_out;     // Pa
    std::optional<double> a_fg;      // m^2
    int multiplicity = 1;            // exact duplicates collapsed into this row

    bool same_values(const MeasurementRow& o) const {
        return q_in == o.q_in && p_in == o.p_in && p_out == o.p_out && a_fg == o.a_fg;
    }
};

/// Rows sorted by q_in with distinct q_in values.
struct MeasurementSet {
    std::string label;
    std::vector<MeasurementRow> rows;

    /// Sorts rows, collapses exact duplicates (counting them in
    /// multiplicity) and checks q_in >= 0. Rows sharing q_in with different
    /// values throw std::invalid_argument.
    static MeasurementSet from_rows(std::string label, std::vector<MeasurementRow> rows);

    std::size_t count_with_p_in() const;
    std::size_t count_with_p_out() const;
};

/// The six published pressure-flow points, (5..30 L/min, 5.4..47.1 kPa).
MeasurementSet builtin_paper_points();

/// Measurement CSV with header q_in_lpm,p_in_kpa,p_out_kpa,a_fg_mm2. Empty
/// fields are absent values, '#' lines and blank lines are skipped. Throws
/// ConfigError with the offending line number.
MeasurementSet read_measurement_csv(std::istream& in, std::string label);
MeasurementSet load_measurement_csv(const std::string& path);
void write_measurement_csv(std::ostream& out, const MeasurementSet& data);

struct QuantityResiduals {
    std::string quantity;          // "p_in", "p_out", "a_fg"
    std::vector<double> q_in;      // m^3/s, per residual
    std::vector<double> residuals; // measured - model, SI
    double rms = 0.0;
};

struct FitReport {
    ModelCoefficients coefficients;
    std::vector<std::string> fitted;  // names of the coefficients that were fitted
    std::vector<QuantityResiduals> quantities;
    std::vector<std::string> warnings;
    int evaluations = 0;
    double objective = 0.0;

    const QuantityResiduals* find(std::string_view quantity) const;
};

/// Root mean square; 0 for an empty list.
double rms_of(const std::vector<double>& v);

/// Least-squares p_in = c1 q + c2 q^2 with c1, c2 >= 0 (exact two-variable
/// active-set solution of the scaled normal equations). The rest of the
/// returned coefficients are copied from base. Throws FitError with fewer than
/// two p_in rows or when the design is rank deficient.
FitReport fit_input_pressure(const MeasurementSet& data, const ModelCoefficients& base = {});

struct ClosureDataset {
    Device device;
    MeasurementSet data;
};

struct ClosureFitOptions {
    int max_evals = 1500;   // per Nelder-Mead run
    int restarts = 4;       // fresh simplices around the incumbent
    double simplex_step = 0.1;
};

/// Fits eta, c_recirc, k0 and p_c to the measured p_out of one or more
/// devices, starting from start (a_fg, when present, is only reported).
/// leak_fraction does not reach p_out and is held at its start value. Throws FitError when no
/// dataset has p_out values.
FitReport fit_closures(const std::vector<ClosureDataset>& datasets, const ModelCoefficients& start,
                       const ClosureFitOptions& options = {});

/// Simulated measurement set: solve_operating_point at each q.
MeasurementSet simulate_measurements(const Device& device, const ModelCoefficients& coeffs,
                                     const std::vector<double>& q_list, std::string label = "simulated");

}  // namespace fdr
