#include "wmamp/cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>

#include "CLI11.hpp"
#include "wmamp/cascade.hpp"
#include "wmamp/cli/format.hpp"
#include "wmamp/stage.hpp"

namespace wmamp::cli {

namespace {

using Report = nlohmann::ordered_json;

const std::set<std::string> kOutputKeys{"output", "output_path"};
const std::set<std::string> kBenchKeys{"theta", "i0", "r1", "r2", "r3", "r4", "t1", "t2", "t3", "t4"};

std::set<std::string> keys(std::initializer_list<std::set<std::string>> parts) {
    std::set<std::string> out;
    for (const auto& p : parts) out.insert(p.begin(), p.end());
    return out;
}

bool verbose() {
    const char* v = std::getenv("WMAMP_VERBOSE");
    return v != nullptr && std::string(v) != "0" && std::string(v).size() > 0;
}

template <typename T>
void fill(std::optional<T>& target, const std::optional<T>& from_config) {
    if (!target && from_config) target = from_config;
}

std::string cell(const Report& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

// Options shared by every report-producing subcommand.
struct CommonOptions {
    std::string output = "table";
    CLI::Option* output_opt = nullptr;
    std::optional<std::string> output_path;
    std::optional<std::string> config_path;

    void attach(CLI::App* sub, bool with_format = true) {
        if (with_format) {
            output_opt = sub->add_option("--output", output, "table, csv or json")
                             ->check(CLI::IsMember({"table", "csv", "json"}));
        }
        sub->add_option("--output-path", output_path, "write data here instead of stdout");
        sub->add_option("--config", config_path, "flat JSON config (keys mirror the flags)");
    }

    std::unique_ptr<ConfigFile> load(const std::set<std::string>& allowed) {
        if (!config_path) return nullptr;
        auto cfg = std::make_unique<ConfigFile>(ConfigFile::load(*config_path, keys({allowed, kOutputKeys})));
        if (output_opt != nullptr && output_opt->count() == 0) {
            if (auto o = cfg->text("output")) output = *o;
        }
        fill(output_path, cfg->text("output_path"));
        return cfg;
    }

    OutputFormat format() const { return parse_output_format(output); }
};

// Data goes to stdout unless --output-path names a file.
class Sink {
public:
    Sink(std::ostream& fallback, const std::optional<std::string>& path) : out_(&fallback) {
        if (path) {
            file_.open(*path);
            if (!file_) throw ConfigError("cannot open output file '" + *path + "'", "output_path");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

void render_flat(std::ostream& out, const Report& report, OutputFormat format) {
    switch (format) {
    case OutputFormat::Json: write_json(out, report); return;
    case OutputFormat::Csv: {
        std::vector<std::string> header, row;
        for (const auto& [k, v] : report.items()) {
            header.push_back(k);
            row.push_back(cell(v));
        }
        write_csv_row(out, header);
        write_csv_row(out, row);
        return;
    }
    case OutputFormat::Table: {
        std::vector<std::pair<std::string, std::string>> rows;
        for (const auto& [k, v] : report.items()) rows.emplace_back(k, cell(v));
        write_key_values(out, rows);
        return;
    }
    }
}

// ---------------------------------------------------------------- stage

struct StageArgs {
    CommonOptions common;
    std::optional<double> theta, delta, chi;
};

void setup_stage(CLI::App* sub, StageArgs& a) {
    sub->add_option("--theta", a.theta, "signal phase (rad)");
    auto* d = sub->add_option("--delta", a.delta, "offset of chi = -(pi/4 + delta) (rad)");
    auto* c = sub->add_option("--chi", a.chi, "post-selection angle (rad)");
    d->excludes(c);
    a.common.attach(sub);
}

int run_stage_cmd(StageArgs& a, std::ostream& out, std::ostream& err) {
    if (auto cfg = a.common.load({"theta", "delta", "chi"})) {
        if (!a.delta && !a.chi) {
            fill(a.delta, cfg->number("delta"));
            fill(a.chi, cfg->number("chi"));
        }
        fill(a.theta, cfg->number("theta"));
    }
    if (!a.theta) throw UsageError("stage: --theta is required");
    if (a.delta.has_value() == a.chi.has_value()) throw UsageError("stage: give exactly one of --delta / --chi");
    const auto format = a.common.format();

    const auto spec = a.delta ? StageSpec::from_delta(*a.theta, *a.delta) : StageSpec::from_chi(*a.theta, *a.chi);
    if (verbose()) {
        err << "wmamp stage: theta=" << format_number(spec.theta()) << " chi=" << format_number(spec.chi()) << "\n";
    }
    const auto r = run_stage_exact(spec);

    Report report;
    report["gamma_exact"] = r.gamma_exact;
    report["gamma_first_order"] = r.gamma_first_order;
    report["h_exact"] = r.h_exact;
    report["h_first_order"] = r.h_first_order;
    report["success_prob"] = r.success_prob;
    report["delta_gamma_bound"] = delta_gamma_bound(spec.theta(), spec.delta());
    Sink sink(out, a.common.output_path);
    render_flat(sink.stream(), report, format);
    return kExitOk;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
    CommonOptions common;
    std::optional<double> theta, hbar, eps;
};

void setup_plan(CLI::App* sub, PlanArgs& a) {
    sub->add_option("--theta", a.theta, "signal phase (rad)");
    sub->add_option("--hbar", a.hbar, "per-stage amplification h_bar (> 1)");
    sub->add_option("--eps", a.eps, "allowed relative error, in (0, 1)");
    a.common.attach(sub);
}

int run_plan_cmd(PlanArgs& a, std::ostream& out, std::ostream& err) {
    if (auto cfg = a.common.load({"theta", "hbar", "eps"})) {
        fill(a.theta, cfg->number("theta"));
        fill(a.hbar, cfg->number("hbar"));
        fill(a.eps, cfg->number("eps"));
    }
    if (!a.theta || !a.hbar || !a.eps) throw UsageError("plan: --theta, --hbar and --eps are required");
    const auto format = a.common.format();

    const auto plan = plan_stages(*a.theta, *a.hbar, *a.eps);
    if (plan.degenerate_budget) {
        err << "warning: error budget 4*eps/theta^2 <= 1 admits no amplification stage; n_stages = 0\n";
    }
    Report report;
    report["theta"] = plan.theta;
    report["h_bar"] = plan.h_bar;
    report["eps_precision"] = plan.eps_precision;
    report["n_real"] = plan.n_real;
    report["n_stages"] = plan.n_stages;
    report["predicted_error"] = plan.predicted_error;
    report["admissible"] = is_admissible(plan);
    report["degenerate_budget"] = plan.degenerate_budget;
    Sink sink(out, a.common.output_path);
    render_flat(sink.stream(), report, format);
    return kExitOk;
}

// ---------------------------------------------------------------- cascade

struct CascadeArgs {
    CommonOptions common;
    std::optional<double> theta;
    std::optional<std::vector<double>> deltas, coeffs, mixings;
};

void setup_cascade(CLI::App* sub, CascadeArgs& a) {
    sub->add_option("--theta", a.theta, "signal phase (rad)");
    auto* d = sub->add_option("--deltas", a.deltas, "per-stage ratio offsets, ratio_k = -1 + delta_k")
                  ->delimiter(',');
    auto* c = sub->add_option("--coeffs", a.coeffs, "initial path coefficients, signal branch last")
                  ->delimiter(',');
    auto* m = sub->add_option("--mixings", a.mixings, "flattened (reference, signal) pairs, one per stage")
                  ->delimiter(',');
    d->excludes(c);
    d->excludes(m);
    a.common.attach(sub);
}

CascadeSpec resolve_cascade(CascadeArgs& a) {
    if (auto cfg = a.common.load({"theta", "deltas", "coeffs", "mixings"})) {
        fill(a.theta, cfg->number("theta"));
        if (!a.deltas && !a.coeffs && !a.mixings) {
            fill(a.deltas, cfg->numbers("deltas"));
            fill(a.coeffs, cfg->numbers("coeffs"));
            fill(a.mixings, cfg->numbers("mixings"));
        }
    }
    if (!a.theta) throw UsageError("cascade: --theta is required");
    if (a.deltas && (a.coeffs || a.mixings)) throw UsageError("cascade: --deltas excludes --coeffs/--mixings");
    if (a.deltas) {
        std::vector<double> ratios;
        for (double d : *a.deltas) ratios.push_back(-1 + d);
        return cascade_from_ratios(*a.theta, ratios);
    }
    if (!a.coeffs || !a.mixings) throw UsageError("cascade: give --deltas, or both --coeffs and --mixings");
    if (a.mixings->size() % 2 != 0) throw ConfigError("mixings must come in (reference, signal) pairs", "mixings");
    CascadeSpec spec;
    spec.theta = *a.theta;
    spec.initial_coeffs = *a.coeffs;
    for (std::size_t i = 0; i < a.mixings->size(); i += 2) {
        spec.stage_mixings.push_back({(*a.mixings)[i], (*a.mixings)[i + 1]});
    }
    return spec;
}

int run_cascade_cmd(CascadeArgs& a, std::ostream& out, std::ostream& err) {
    const auto spec = resolve_cascade(a);
    const auto format = a.common.format();
    if (verbose()) err << "wmamp cascade: " << spec.stages() << " stage(s)\n";
    const auto r = run_cascade(spec);

    double h_first_total = 1;
    for (const auto& s : r.per_stage) h_first_total *= s.h_first_order;

    Sink sink(out, a.common.output_path);
    auto& os = sink.stream();
    const std::vector<std::string> header{"stage",         "gamma_exact", "gamma_first_order",      "h_exact",
                                          "h_first_order", "ratio",       "success_prob_cumulative"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < r.per_stage.size(); ++k) {
        const auto& s = r.per_stage[k];
        rows.push_back({std::to_string(k + 1), format_number(s.gamma_exact), format_number(s.gamma_first_order),
                        format_number(s.h_exact), format_number(s.h_first_order), format_number(s.ratio),
                        format_number(s.success_prob_cumulative)});
    }
    switch (format) {
    case OutputFormat::Json: {
        Report report;
        report["theta"] = spec.theta;
        report["stages"] = Report::array();
        for (const auto& s : r.per_stage) {
            Report row;
            row["gamma_exact"] = s.gamma_exact;
            row["gamma_first_order"] = s.gamma_first_order;
            row["h_exact"] = s.h_exact;
            row["h_first_order"] = s.h_first_order;
            row["ratio"] = s.ratio;
            row["success_prob_cumulative"] = s.success_prob_cumulative;
            report["stages"].push_back(row);
        }
        report["phi_final"] = r.phi_final;
        report["phi_first_order"] = r.phi_first_order;
        report["h_total"] = r.h_total;
        report["h_total_first_order"] = h_first_total;
        report["success_prob"] = r.success_prob;
        write_json(os, report);
        break;
    }
    case OutputFormat::Csv:
        write_csv_row(os, header);
        for (const auto& row : rows) write_csv_row(os, row);
        write_csv_row(os, {"total", format_number(r.phi_final), format_number(r.phi_first_order),
                           format_number(r.h_total), format_number(h_first_total), "",
                           format_number(r.success_prob)});
        break;
    case OutputFormat::Table:
        write_table(os, header, rows);
        os << '\n';
        write_key_values(os, {{"theta", format_number(spec.theta)},
                              {"phi_final", format_number(r.phi_final)},
                              {"phi_first_order", format_number(r.phi_first_order)},
                              {"h_total", format_number(r.h_total)},
                              {"h_total_first_order", format_number(h_first_total)},
                              {"success_prob", format_number(r.success_prob)}});
        break;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- bench parameters

struct BenchArgs {
    std::optional<double> theta, i0;
    std::optional<double> r[4], t[4];

    void attach(CLI::App* sub) {
        sub->add_option("--theta", theta, "signal phase (rad)");
        sub->add_option("--i0", i0, "post-selected intensity I0 (default 1)");
        for (int k = 0; k < 4; ++k) {
            const auto n = std::to_string(k + 1);
            sub->add_option("--r" + n, r[k], "BS" + n + " reflection coefficient");
            sub->add_option("--t" + n, t[k], "BS" + n + " transmission coefficient (default sqrt(1 - r^2))");
        }
    }

    void fill_from(const ConfigFile* cfg) {
        if (cfg == nullptr) return;
        fill(theta, cfg->number("theta"));
        fill(i0, cfg->number("i0"));
        for (int k = 0; k < 4; ++k) {
            const auto n = std::to_string(k + 1);
            fill(r[k], cfg->number("r" + n));
            fill(t[k], cfg->number("t" + n));
        }
    }

    // Unset splitters fall back to `defaults` when given, otherwise they are required.
    optics::OpticsConfig resolve(const optics::OpticsConfig* defaults) const {
        optics::OpticsConfig c = defaults ? *defaults : optics::OpticsConfig{};
        optics::BeamSplitter* bs[4] = {&c.bs1, &c.bs2, &c.bs3, &c.bs4};
        for (int k = 0; k < 4; ++k) {
            const auto n = std::to_string(k + 1);
            if (!r[k]) {
                if (defaults == nullptr) throw ConfigError("missing reflection coefficient r" + n, "r" + n);
                if (t[k]) throw ConfigError("t" + n + " given without r" + n, "r" + n);
                continue;
            }
            if (!std::isfinite(*r[k]) || std::abs(*r[k]) > 1) {
                throw ConfigError("r" + n + " must lie in [-1, 1]", "r" + n);
            }
            *bs[k] = t[k] ? optics::BeamSplitter{*r[k], *t[k]} : optics::BeamSplitter::from_r(*r[k]);
        }
        if (theta) {
            c.theta = *theta;
        } else if (defaults == nullptr) {
            throw ConfigError("missing theta", "theta");
        }
        if (i0) c.intensity_i0 = *i0;
        c.validate();
        return c;
    }
};

// ---------------------------------------------------------------- optics

struct OpticsArgs {
    CommonOptions common;
    BenchArgs bench;
    bool check_abstract = false;
};

void setup_optics(CLI::App* sub, OpticsArgs& a) {
    a.bench.attach(sub);
    sub->add_flag("--check-abstract", a.check_abstract, "also run the mapped abstract cascade and report deviations");
    a.common.attach(sub);
}

int run_optics_cmd(OpticsArgs& a, std::ostream& out, std::ostream& err) {
    auto cfg = a.common.load(keys({kBenchKeys, {"check_abstract"}}));
    a.bench.fill_from(cfg.get());
    if (cfg && cfg->flag("check_abstract")) a.check_abstract = true;
    const auto config = a.bench.resolve(nullptr);
    const auto format = a.common.format();
    if (verbose()) err << "wmamp optics: kappa=" << format_number(config.kappa()) << "\n";

    const auto r = optics::run_full(config);
    Report report;
    report["theta"] = config.theta;
    report["gamma"] = r.gamma;
    report["phi"] = r.phi;
    report["gamma_first_order"] = r.gamma_first_order;
    report["phi_first_order"] = r.phi_first_order;
    report["h1"] = r.h1;
    report["h2"] = r.h2;
    report["h_total"] = r.h_total;
    report["delta_i"] = r.delta_i;
    report["success_prob"] = r.success_prob;
    if (a.check_abstract) {
        const auto abstract = run_cascade(optics::map_to_abstract(config));
        const double scale = std::max(std::abs(r.phi), std::abs(abstract.phi_final));
        report["abstract_phi"] = abstract.phi_final;
        report["abstract_phi_rel_deviation"] = scale > 0 ? std::abs(r.phi - abstract.phi_final) / scale : 0.0;
        report["abstract_prob_deviation"] = std::abs(r.success_prob - abstract.success_prob);
    }
    Sink sink(out, a.common.output_path);
    render_flat(sink.stream(), report, format);
    return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    CommonOptions common;
    BenchArgs bench;
    std::optional<std::string> variable, scale;
    std::optional<double> start, stop, delta, hbar, eps;
    std::optional<int> count;
};

void setup_sweep(CLI::App* sub, SweepArgs& a) {
    sub->add_option("--variable", a.variable, "theta, delta, h_bar, eps_precision, r3 or r4");
    sub->add_option("--start", a.start, "first grid value");
    sub->add_option("--stop", a.stop, "last grid value");
    sub->add_option("--count", a.count, "number of grid points (>= 2)");
    sub->add_option("--scale", a.scale, "linear or log")->check(CLI::IsMember({"linear", "log"}));
    sub->add_option("--delta", a.delta, "fixed delta for theta sweeps (default 1e-2)");
    sub->add_option("--hbar", a.hbar, "fixed h_bar for planner sweeps (default 1e2)");
    sub->add_option("--eps", a.eps, "fixed eps for planner sweeps (default 1e-6)");
    a.bench.attach(sub);
    a.common.attach(sub, false);
}

int run_sweep_cmd(SweepArgs& a, std::ostream& out, std::ostream& err) {
    auto cfg = a.common.load(keys({kBenchKeys, {"variable", "start", "stop", "count", "scale", "delta", "hbar", "eps"}}));
    if (cfg) {
        fill(a.variable, cfg->text("variable"));
        fill(a.scale, cfg->text("scale"));
        fill(a.start, cfg->number("start"));
        fill(a.stop, cfg->number("stop"));
        fill(a.delta, cfg->number("delta"));
        fill(a.hbar, cfg->number("hbar"));
        fill(a.eps, cfg->number("eps"));
        if (!a.count) {
            if (auto c = cfg->number("count")) {
                if (*c != std::floor(*c)) throw ConfigError("count must be an integer", "count");
                a.count = static_cast<int>(*c);
            }
        }
    }
    a.bench.fill_from(cfg.get());
    if (!a.variable || !a.start || !a.stop || !a.count) {
        throw UsageError("sweep: --variable, --start, --stop and --count are required");
    }

    SweepSpec spec;
    spec.variable = parse_sweep_variable(*a.variable);
    spec.start = *a.start;
    spec.stop = *a.stop;
    spec.count = *a.count;
    if (a.scale) {
        if (*a.scale == "log") {
            spec.scale = SweepScale::Log;
        } else if (*a.scale != "linear") {
            throw UsageError("sweep: --scale must be linear or log");
        }
    }
    if (a.bench.theta) spec.theta = *a.bench.theta;
    if (a.delta) spec.delta = *a.delta;
    if (a.hbar) spec.h_bar = *a.hbar;
    if (a.eps) spec.eps_precision = *a.eps;
    optics::OpticsConfig balanced;
    balanced.bs1 = balanced.bs2 = balanced.bs3 = balanced.bs4 = optics::BeamSplitter::balanced();
    balanced.theta = spec.theta;
    spec.bench = a.bench.resolve(&balanced);
    spec.validate();

    if (verbose()) err << "wmamp sweep: " << to_string(spec.variable) << " x " << spec.count << "\n";
    const auto rows = sweep_rows(spec);
    Sink sink(out, a.common.output_path);
    write_csv_row(sink.stream(), sweep_header(spec.variable));
    for (const auto& row : rows) write_csv_row(sink.stream(), row);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weak-measurement phase amplification: stages, cascades, planner, optical bench, sweeps",
                 "wmamp"};
    app.require_subcommand(1);

    StageArgs stage;
    PlanArgs plan;
    CascadeArgs cascade;
    OpticsArgs optics_args;
    SweepArgs sweep;
    auto* stage_cmd = app.add_subcommand("stage", "one exact amplification stage");
    auto* plan_cmd = app.add_subcommand("plan", "number of cascade stages for an error budget");
    auto* cascade_cmd = app.add_subcommand("cascade", "multi-stage amplification");
    auto* optics_cmd = app.add_subcommand("optics", "two-stage optical bench");
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep to CSV");
    setup_stage(stage_cmd, stage);
    setup_plan(plan_cmd, plan);
    setup_cascade(cascade_cmd, cascade);
    setup_optics(optics_cmd, optics_args);
    setup_sweep(sweep_cmd, sweep);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*stage_cmd) return run_stage_cmd(stage, out, err);
        if (*plan_cmd) return run_plan_cmd(plan, out, err);
        if (*cascade_cmd) return run_cascade_cmd(cascade, out, err);
        if (*optics_cmd) return run_optics_cmd(optics_args, out, err);
        if (*sweep_cmd) return run_sweep_cmd(sweep, out, err);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ForbiddenDeltaError& e) {
        err << "forbidden point";
        if (e.stage > 0) err << " at stage " << e.stage;
        err << ": " << e.what() << "\n";
        return kExitForbidden;
    } catch (const PhysicalError& e) {
        err << "forbidden point: " << e.what() << "\n";
        return kExitForbidden;
    } catch (const ConfigError& e) {
        err << "config error";
        if (!e.field.empty()) err << " [" << e.field << "]";
        err << ": " << e.what() << "\n";
        return kExitData;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace wmamp::cli
