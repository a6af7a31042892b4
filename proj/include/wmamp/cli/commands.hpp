#pragma once

// Command-line front end. `run` is the whole program minus process setup, so
// tests drive it in-process with string streams.

#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wmamp/optics.hpp"

namespace wmamp::cli {

// Stable across all subcommands.
enum ExitCode : int {
    kExitOk = 0,
    kExitForbidden = 2,  // physical forbidden point / phase lost
    kExitUsage = 64,     // bad flags
    kExitData = 65,      // bad config or parameter data
    kExitInternal = 70,
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Table, Csv, Json };

OutputFormat parse_output_format(const std::string& name);

/// Flat JSON config: snake_case keys mirroring the flag names plus an
/// optional "schema_version" (must be 1).
class ConfigFile {
public:
    static ConfigFile load(const std::string& path, const std::set<std::string>& allowed_keys);
    static ConfigFile parse(const std::string& text, const std::set<std::string>& allowed_keys);

    std::optional<double> number(const std::string& key) const;
    /// Accepts a flat array or an array of arrays (flattened row-major).
    std::optional<std::vector<double>> numbers(const std::string& key) const;
    std::optional<std::string> text(const std::string& key) const;
    bool flag(const std::string& key) const;

private:
    explicit ConfigFile(nlohmann::json doc) : doc_(std::move(doc)) {}
    nlohmann::json doc_;
};

enum class SweepVariable { Theta, Delta, HBar, EpsPrecision, R3, R4 };
enum class SweepScale { Linear, Log };

SweepVariable parse_sweep_variable(const std::string& name);
std::string to_string(SweepVariable v);

struct SweepSpec {
    SweepVariable variable = SweepVariable::Theta;
    double start = 0;
    double stop = 0;
    int count = 2;
    SweepScale scale = SweepScale::Linear;

    // Parameters held fixed while `variable` moves.
    double theta = 1e-4;
    double delta = 1e-2;
    double h_bar = 1e2;
    double eps_precision = 1e-6;
    optics::OpticsConfig bench{};

    /// Throws UsageError for count < 2, start >= stop, or non-positive log endpoints.
    void validate() const;
    /// Ascending grid; endpoints are exactly start and stop.
    std::vector<double> grid() const;
};

std::vector<std::string> sweep_header(SweepVariable variable);
/// One row per grid point, ascending. Points are evaluated on up to `threads`
/// workers (0 = hardware concurrency); the output order does not depend on it.
std::vector<std::vector<std::string>> sweep_rows(const SweepSpec& spec, unsigned threads = 0);

/// Runs the program on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wmamp::cli
