#include "fdr/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fdr/ejector.hpp"
#include "fdr/errors.hpp"
#include "fdr/gate.hpp"
#include "fdr/units.hpp"

namespace fdr {

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::blowing: return "blowing";
        case Mode::suction: return "suction";
        case Mode::neutral: return "neutral";
    }
    return "neutral";
}

Mode classify_mode(double p_out) {
    if (p_out > kModeDeadband) return Mode::blowing;
    if (p_out < -kModeDeadband) return Mode::suction;
    return Mode::neutral;
}

namespace {

std::string lpm_text(double q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g L/min", units::m3s_to_lpm(q));
    return buf;
}

}  // namespace

OperatingState solve_operating_point(double q_in, const Device& device, const ModelCoefficients& coeffs,
                                     const OperatingPointOptions& options) {
    if (!std::isfinite(q_in) || q_in < 0.0)
        throw std::domain_error("q_in must be finite and >= 0");
    if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");

    const DeviceGeometry& g = device.geometry;
    const GateComplianceModel model = compliance_model(g, coeffs);

    OperatingState st;
    st.q_in = q_in;
    st.supersonic_jet = jet_is_supersonic(q_in, g, device.fluid);

    // the gate starts closed (rest state)
    double a_prev = 0.0;
    GateState gate{};
    bool have_network = false;
    double network_a = 0.0;
    for (int it = 1; it <= options.max_iterations; ++it) {
        st.p_in = input_pressure(q_in, coeffs);
        st.p_chamber = bifurcation_pressure(q_in, st.p_in, device.fluid, g);
        gate = opening_area(st.p_chamber, model, g.gate, device.material);

        if (!have_network || gate.a_fg != network_a) {
            const FlowNetwork net = assemble_network(g, gate.a_fg, coeffs, device.fluid);
            st.network = solve_steady(net, q_in, options.network);
            network_a = gate.a_fg;
            have_network = true;
        }

        st.fixed_point_iterations = it;
        if (std::abs(gate.a_fg - a_prev) < options.gate_tolerance) {
            st.a_fg = gate.a_fg;
            st.open_fraction = gate.open_fraction;
            st.p_out = output_pressure(q_in, gate, g, device.fluid, coeffs);
            st.mode = classify_mode(st.p_out);
            return st;
        }
        if (it == options.max_iterations) {
            throw FixedPointError("gate opening did not converge at q_in = " + lpm_text(q_in), a_prev,
                                  gate.a_fg);
        }
        a_prev = gate.a_fg;
    }
    throw FixedPointError("gate opening did not converge at q_in = " + lpm_text(q_in), a_prev, gate.a_fg);
}

std::vector<double> sweep_grid(double q_start, double q_end, double step) {
    if (!(std::isfinite(q_start) && std::isfinite(q_end) && std::isfinite(step)))
        throw std::invalid_argument("sweep range must be finite");
    if (!(q_start < q_end)) throw std::invalid_argument("sweep needs q_start < q_end");
    if (!(step > 0.0)) throw std::invalid_argument("sweep step must be > 0");

    const double span = (q_end - q_start) / step;
    auto n = static_cast<long long>(std::floor(span + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (long long i = 0; i <= n; ++i) grid.push_back(q_start + static_cast<double>(i) * step);
    // snap the end point when the range is a whole number of steps
    if (std::abs(span - static_cast<double>(n)) < 1e-9) grid.back() = q_end;
    return grid;
}

namespace {

OperatingState solve_wrapped(const PointSolver& solve, double q) {
    try {
        return solve(q);
    } catch (const SweepPointError&) {
        throw;
    } catch (const SolverError& e) {
        throw SweepPointError(q, std::string("at q_in = ") + lpm_text(q) + ": " + e.what(), e.last_residual());
    }
}

std::vector<OperatingState> solve_grid(const PointSolver& solve, const std::vector<double>& grid, unsigned workers) {
    std::vector<OperatingState> states(grid.size());
    const std::size_t n = grid.size();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));

    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) states[i] = solve_wrapped(solve, grid[i]);
        return states;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_index = n;
    std::exception_ptr err;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                states[i] = solve_wrapped(solve, grid[i]);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                // report the lowest failing grid point so the error is deterministic
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (err) std::rethrow_exception(err);
    return states;
}

int sign_of(double p_out) {
    if (p_out > kModeDeadband) return 1;
    if (p_out < -kModeDeadband) return -1;
    return 0;
}

}  // namespace

SweepResult sweep_with(const PointSolver& solve, double q_start, double q_end, double step,
                       const SweepOptions& options) {
    const std::vector<double> grid = sweep_grid(q_start, q_end, step);

    SweepResult res;
    res.states = solve_grid(solve, grid, options.workers);

    std::optional<std::size_t> last_signed;
    std::optional<std::pair<std::size_t, std::size_t>> bracket;
    for (std::size_t i = 0; i < res.states.size(); ++i) {
        const double p = res.states[i].p_out;
        res.max_blow = std::max(res.max_blow, p);
        res.max_suck = std::max(res.max_suck, -p);
        const int s = sign_of(p);
        if (s == 0) continue;
        if (last_signed && sign_of(res.states[*last_signed].p_out) != s) {
            ++res.sign_changes;
            if (!bracket) bracket = std::make_pair(*last_signed, i);
        }
        last_signed = i;
    }

    if (bracket) {
        double qa = res.states[bracket->first].q_in;
        double qb = res.states[bracket->second].q_in;
        const double pa = res.states[bracket->first].p_out;
        // a neutral grid point inside the bracket is already a root
        OperatingState hit;
        bool found = false;
        for (std::size_t i = bracket->first + 1; i < bracket->second; ++i) {
            if (std::abs(res.states[i].p_out) < options.switch_tolerance) {
                hit = res.states[i];
                found = true;
                break;
            }
        }
        for (int k = 0; !found && k < options.max_bisection_steps; ++k) {
            const double qm = 0.5 * (qa + qb);
            hit = solve_wrapped(solve, qm);
            if (std::abs(hit.p_out) < options.switch_tolerance || qm <= qa || qm >= qb) {
                found = true;
                break;
            }
            if ((hit.p_out > 0.0) == (pa > 0.0))
                qa = qm;
            else
                qb = qm;
        }
        res.switching_q = hit.q_in;
        res.switching_p_in = hit.p_in;
    }
    return res;
}

SweepResult sweep(const Device& device, const ModelCoefficients& coeffs, double q_start, double q_end, double step,
                  const SweepOptions& options) {
    coeffs.validate();
    if (q_start < 0.0) throw std::domain_error("sweep needs q_start >= 0");
    PointSolver solve = [&](double q) { return solve_operating_point(q, device, coeffs); };
    return sweep_with(solve, q_start, q_end, step, options);
}

unsigned workers_from_env() {
    const char* raw = std::getenv("FDR_WORKERS");
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0' || v < 1 || v > 1024)
        throw ConfigError(std::string("FDR_WORKERS must be a positive integer, got '") + raw + "'");
    return static_cast<unsigned>(v);
}

std::vector<DesignRow> compare_designs(const std::vector<std::string>& type_ids, const ModelCoefficients& coeffs,
                                       const RampSpec& ramp, const SweepOptions& options) {
    if (type_ids.empty()) throw std::invalid_argument("compare_designs needs at least one type");
    std::vector<Device> devices;
    devices.reserve(type_ids.size());
    for (const auto& id : type_ids) devices.push_back(table1_device(id));  // validate all up front

    std::vector<DesignRow> rows;
    rows.reserve(type_ids.size());
    for (std::size_t i = 0; i < type_ids.size(); ++i)
        rows.push_back({type_ids[i], sweep(devices[i], coeffs, ramp.q_start, ramp.q_end, ramp.step, options)});
    return rows;
}

std::vector<OrderingEntry> ordering_report(const std::vector<DesignRow>& rows) {
    std::vector<OrderingEntry> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        OrderingEntry e;
        e.type_id = r.type_id;
        e.switching_q = r.result.switching_q;
        e.switching_p_in = r.result.switching_p_in;
        e.max_blow = r.result.max_blow;
        e.max_suck = r.result.max_suck;
        e.p_out_at_end = r.result.states.empty() ? 0.0 : r.result.states.back().p_out;
        e.sign_changes = r.result.sign_changes;
        out.push_back(e);
    }
    return out;
}

}  // namespace fdr
