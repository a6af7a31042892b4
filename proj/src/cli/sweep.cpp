#include <algorithm>
#include <cmath>
#include <thread>

#include "wmamp/cascade.hpp"
#include "wmamp/cli/commands.hpp"
#include "wmamp/cli/format.hpp"
#include "wmamp/stage.hpp"

namespace wmamp::cli {

SweepVariable parse_sweep_variable(const std::string& name) {
    if (name == "theta") return SweepVariable::Theta;
    if (name == "delta") return SweepVariable::Delta;
    if (name == "h_bar" || name == "hbar") return SweepVariable::HBar;
    if (name == "eps_precision" || name == "eps") return SweepVariable::EpsPrecision;
    if (name == "r3") return SweepVariable::R3;
    if (name == "r4") return SweepVariable::R4;
    throw UsageError("unknown sweep variable '" + name + "'");
}

std::string to_string(SweepVariable v) {
    switch (v) {
    case SweepVariable::Theta: return "theta";
    case SweepVariable::Delta: return "delta";
    case SweepVariable::HBar: return "h_bar";
    case SweepVariable::EpsPrecision: return "eps_precision";
    case SweepVariable::R3: return "r3";
    case SweepVariable::R4: return "r4";
    }
    return "?";
}

void SweepSpec::validate() const {
    if (count < 2) throw UsageError("sweep count must be >= 2");
    if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop)) {
        throw UsageError("sweep range needs finite start < stop");
    }
    if (scale == SweepScale::Log && !(start > 0)) throw UsageError("log sweep needs positive endpoints");
}

std::vector<double> SweepSpec::grid() const {
    validate();
    std::vector<double> g(static_cast<std::size_t>(count));
    const double n = count - 1;
    for (int i = 0; i < count; ++i) {
        const double f = i / n;
        g[static_cast<std::size_t>(i)] = scale == SweepScale::Linear
                                             ? start + f * (stop - start)
                                             : std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
    }
    g.front() = start;
    g.back() = stop;
    return g;
}

namespace {

enum class Family { Stage, Plan, Bench };

Family family_of(SweepVariable v) {
    switch (v) {
    case SweepVariable::Theta:
    case SweepVariable::Delta: return Family::Stage;
    case SweepVariable::HBar:
    case SweepVariable::EpsPrecision: return Family::Plan;
    default: return Family::Bench;
    }
}

std::string num(double x) { return format_number(x); }

std::vector<std::string> status_row(std::vector<std::string> row, const std::string& status, std::size_t width) {
    row.push_back(status);
    row.resize(width);
    return row;
}

std::vector<std::string> stage_row(const SweepSpec& s, std::size_t index, double value) {
    const double theta = s.variable == SweepVariable::Theta ? value : s.theta;
    const double delta = s.variable == SweepVariable::Delta ? value : s.delta;
    std::vector<std::string> row{std::to_string(index), num(theta), num(delta)};
    const std::size_t width = sweep_header(s.variable).size();
    try {
        const auto r = run_stage_exact(StageSpec::from_delta(theta, delta));
        row.insert(row.end(), {"ok", num(r.gamma_exact), num(r.gamma_first_order),
                               num(std::abs(r.gamma_exact - r.gamma_first_order)), num(r.h_exact),
                               num(r.h_first_order), num(r.success_prob), num(delta_gamma_bound(theta, delta))});
        return row;
    } catch (const PhysicalError&) {
        return status_row(std::move(row), "forbidden", width);
    } catch (const DataError&) {
        return status_row(std::move(row), "invalid", width);
    }
}

std::vector<std::string> plan_row(const SweepSpec& s, std::size_t index, double value) {
    const double h_bar = s.variable == SweepVariable::HBar ? value : s.h_bar;
    const double eps = s.variable == SweepVariable::EpsPrecision ? value : s.eps_precision;
    std::vector<std::string> row{std::to_string(index), num(s.theta), num(h_bar), num(eps)};
    const std::size_t width = sweep_header(s.variable).size();
    try {
        const auto p = plan_stages(s.theta, h_bar, eps);
        row.insert(row.end(), {"ok", num(p.n_real), std::to_string(p.n_stages), num(p.predicted_error),
                               is_admissible(p) ? "true" : "false", p.degenerate_budget ? "true" : "false"});
        return row;
    } catch (const DataError&) {
        return status_row(std::move(row), "invalid", width);
    }
}

std::vector<std::string> bench_row(const SweepSpec& s, std::size_t index, double value) {
    auto config = s.bench;
    config.theta = s.theta;
    std::vector<std::string> row{std::to_string(index)};
    const std::size_t width = sweep_header(s.variable).size();
    try {
        (s.variable == SweepVariable::R3 ? config.bs3 : config.bs4) = optics::BeamSplitter::from_r(value);
    } catch (const DataError&) {
        row.insert(row.end(), {num(s.variable == SweepVariable::R3 ? value : config.bs3.r),
                               num(s.variable == SweepVariable::R4 ? value : config.bs4.r), num(s.theta)});
        return status_row(std::move(row), "invalid", width);
    }
    row.insert(row.end(), {num(config.bs3.r), num(config.bs4.r), num(s.theta)});
    try {
        const auto r = optics::run_full(config);
        row.insert(row.end(), {"ok", num(r.gamma), num(r.phi), num(r.h1), num(r.h2), num(r.h_total),
                               num(r.delta_i), num(r.success_prob)});
        return row;
    } catch (const PhysicalError&) {
        return status_row(std::move(row), "forbidden", width);
    } catch (const DataError&) {
        return status_row(std::move(row), "invalid", width);
    }
}

} // namespace

std::vector<std::string> sweep_header(SweepVariable variable) {
    switch (family_of(variable)) {
    case Family::Stage:
        return {"index", "theta", "delta", "status", "gamma_exact", "gamma_first_order", "abs_error",
                "h_exact", "h_first_order", "success_prob", "delta_gamma_bound"};
    case Family::Plan:
        return {"index", "theta", "h_bar", "eps_precision", "status", "n_real", "n_stages", "predicted_error",
                "admissible", "degenerate_budget"};
    case Family::Bench:
        return {"index", "r3", "r4", "theta", "status", "gamma", "phi", "h1", "h2", "h_total", "delta_i",
                "success_prob"};
    }
    return {};
}

std::vector<std::vector<std::string>> sweep_rows(const SweepSpec& spec, unsigned threads) {
    const auto grid = spec.grid();
    std::vector<std::vector<std::string>> rows(grid.size());
    auto eval = [&](std::size_t i) {
        switch (family_of(spec.variable)) {
        case Family::Stage: rows[i] = stage_row(spec, i, grid[i]); break;
        case Family::Plan: rows[i] = plan_row(spec, i, grid[i]); break;
        case Family::Bench: rows[i] = bench_row(spec, i, grid[i]); break;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) eval(i);
        return rows;
    }
    {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                for (std::size_t i = t; i < grid.size(); i += threads) eval(i);
            });
        }
    }
    return rows;
}

} // namespace wmamp::cli
