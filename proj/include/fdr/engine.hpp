#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/core.hpp"
#include "fdr/flow.hpp"
#include "fdr/model_coefficients.hpp"

namespace fdr {

enum class Mode { blowing, suction, neutral };

std::string_view to_string(Mode mode);

/// |p_out| at or below this is reported as neutral (Pa).
inline constexpr double kModeDeadband = 1.0;

Mode classify_mode(double p_out);

/// One solved equilibrium of the device.
struct OperatingState {
    double q_in = 0.0;        // m^3/s
    double p_in = 0.0;        // Pa
    double p_chamber = 0.0;   // Pa
    double a_fg = 0.0;        // m^2
    double open_fraction = 0.0;
    double p_out = 0.0;       // Pa, positive = blowing
    Mode mode = Mode::neutral;

    int fixed_point_iterations = 0;
    bool supersonic_jet = false;
    NetworkSolution network;  // internal flow path at the converged gate opening
};

struct OperatingPointOptions {
    double gate_tolerance = 1e-12;  // m^2
    int max_iterations = 100;
    SolveOptions network{};
};

/// Coupled solve: input law -> bifurcation pressure -> gate opening ->
/// network, repeated until the gate opening is stationary; p_out from the
/// ejector closure. Throws FixedPointError / SolverError.
OperatingState solve_operating_point(double q_in, const Device& device, const ModelCoefficients& coeffs,
                                     const OperatingPointOptions& options = {});

struct SweepOptions {
    unsigned workers = 1;
    double switch_tolerance = kModeDeadband;  // |p_out| target of the bisection, Pa
    int max_bisection_steps = 200;
};

struct SweepResult {
    std::vector<OperatingState> states;  // strictly increasing q_in
    std::optional<double> switching_q;     // m^3/s
    std::optional<double> switching_p_in;  // Pa
    double max_blow = 0.0;                 // Pa
    double max_suck = 0.0;                 // Pa, magnitude
    int sign_changes = 0;
};

using PointSolver = std::function<OperatingState(double q_in)>;

/// Inclusive grid q_start, q_start + step, ..., q_end. When the range is not
/// a whole number of steps the last point is the largest one below q_end.
std::vector<double> sweep_grid(double q_start, double q_end, double step);

/// Quasi-static ramp using an arbitrary point solver. Grid points are solved
/// independently (possibly on several threads) and assembled by index.
SweepResult sweep_with(const PointSolver& solve, double q_start, double q_end, double step,
                       const SweepOptions& options = {});

SweepResult sweep(const Device& device, const ModelCoefficients& coeffs, double q_start, double q_end, double step,
                  const SweepOptions& options = {});

/// Worker count from FDR_WORKERS (positive integer); 1 when unset.
/// Throws ConfigError on a malformed value.
unsigned workers_from_env();

/// Default ramp of the design study: 0 -> 30 L/min in 0.1 L/min steps.
struct RampSpec {
    double q_start = 0.0;
    double q_end = 30.0 / 60000.0;
    double step = 0.1 / 60000.0;
};

struct DesignRow {
    std::string type_id;
    SweepResult result;
};

/// One sweep per built-in type under identical coefficients, in the given order.
std::vector<DesignRow> compare_designs(const std::vector<std::string>& type_ids, const ModelCoefficients& coeffs,
                                       const RampSpec& ramp = {}, const SweepOptions& options = {});

struct OrderingEntry {
    std::string type_id;
    std::optional<double> switching_q;
    std::optional<double> switching_p_in;
    double max_blow = 0.0;
    double max_suck = 0.0;
    double p_out_at_end = 0.0;
    int sign_changes = 0;
};

std::vector<OrderingEntry> ordering_report(const std::vector<DesignRow>& rows);

}  // namespace fdr
