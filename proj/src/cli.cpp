#include "spenra/cli.hpp"

#include "spenra/classic.hpp"
#include "spenra/csv_io.hpp"
#include "spenra/entropy.hpp"
#include "spenra/error.hpp"
#include "spenra/manifest.hpp"
#include "spenra/parallel.hpp"
#include "spenra/selection.hpp"
#include "spenra/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spenra::cli {
namespace {

/// Bad flag combinations detected after parsing; maps to the usage exit code.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::optional<int> threads;
    bool quiet = false;
};

struct OutputTarget {
    std::string output;
    std::string manifest;
};

struct GenerateArgs {
    std::string system;
    std::size_t n = 1000;
    std::optional<double> theta;
    std::optional<double> dt;
    std::optional<double> burn_in;
};

struct SelectArgs {
    std::string input;
    std::size_t max_p = 12;
    std::size_t l = 50;
};

struct EstimateArgs {
    std::string input;
    std::optional<std::size_t> p;
    std::string bandwidths;
    bool automatic = false;
    std::size_t max_p = 12;
    std::size_t l = 50;
    std::optional<double> window;
};

struct ClassicArgs {
    std::string input;
    std::string estimator;
    std::size_t p = 2;
    std::optional<double> r;
    bool skip_isolated = false;
};

using Config = std::vector<std::pair<std::string, std::string>>;

class Run {
public:
    Run(const std::vector<std::string>& args, const Globals& globals, std::ostream& out, std::ostream& err)
        : args_(args), globals_(globals), out_(out), err_(err), start_(std::chrono::steady_clock::now()) {}

    std::ostream& out() { return out_; }

    void progress(const std::string& line) {
        if (!globals_.quiet) err_ << line << '\n';
    }

    Series read_input(const std::string& path) {
        input_path_ = path;
        input_digest_ = file_sha256(path);
        return read_series_file(path);
    }

    /// Writes `text` to the output file, or to standard output when none was given.
    void emit(const OutputTarget& target, const std::string& text) {
        if (target.output.empty()) {
            out_ << text;
            return;
        }
        std::ofstream file(target.output, std::ios::binary);
        if (!file) throw Error(ErrorCode::IoError, "cannot write " + target.output);
        file << text;
        if (!file) throw Error(ErrorCode::IoError, "write failed for " + target.output);
    }

    void finish(const OutputTarget& target, Config config) {
        std::string path = target.manifest;
        if (path.empty() && !target.output.empty()) path = target.output + ".manifest.json";
        if (path.empty()) return;
        RunManifest m;
        m.command_line = args_;
        m.config = std::move(config);
        m.seed = globals_.seed;
        m.version = SPENRA_VERSION;
        m.input_path = input_path_;
        m.input_sha256 = input_digest_;
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_manifest(path, m);
    }

private:
    const std::vector<std::string>& args_;
    const Globals& globals_;
    std::ostream& out_;
    std::ostream& err_;
    std::chrono::steady_clock::time_point start_;
    std::optional<std::string> input_path_;
    std::optional<std::string> input_digest_;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const char* first = text.data() + pos;
        const char* last = text.data() + comma;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
            throw UsageError("cannot parse bandwidth list '" + text + "'");
        }
        values.push_back(v);
        pos = comma + 1;
    }
    return values;
}

std::string join(const std::vector<double>& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ',';
        s += format_full(values[i]);
    }
    return s;
}

int cmd_generate(Run& run, const Globals& g, const GenerateArgs& a, const OutputTarget& target) {
    if (a.n == 0) throw UsageError("--n must be positive");
    Config config{{"command", "generate"}, {"system", a.system}, {"n", std::to_string(a.n)}};
    Trailers trailers{{"seed", std::to_string(g.seed)}, {"system", a.system}};
    std::optional<Series> series;

    if (a.system == "markov2") {
        if (a.theta || a.dt || a.burn_in) throw UsageError("--theta, --dt and --burn-in apply only to flow systems");
        series = gen_markov2(Markov2Params{}, a.n, g.seed);
    } else if (a.system == "concat") {
        if (a.theta) throw UsageError("--theta is fixed per segment for concat");
        if (a.dt || a.burn_in) throw UsageError("--dt and --burn-in are not supported for concat");
        if (a.n % 3 != 0) throw UsageError("--n must be a multiple of 3 for concat (three equal segments)");
        series = benchmark_concatenated(a.n / 3, g.seed);
        const std::size_t seg = a.n / 3;
        trailers.emplace_back("boundaries", std::to_string(seg) + "," + std::to_string(2 * seg));
    } else {
        const OdeSystem system = a.system == "lorenz-iei" ? OdeSystem::Lorenz : OdeSystem::Rossler;
        const double theta = a.theta.value_or(default_theta(system));
        series = benchmark_iei(system, a.n, g.seed, theta, a.dt, a.burn_in);
        trailers.emplace_back("theta", format_full(theta));
        config.emplace_back("theta", format_full(theta));
        if (a.dt) config.emplace_back("dt", format_full(*a.dt));
        if (a.burn_in) config.emplace_back("burn_in", format_full(*a.burn_in));
    }

    std::ostringstream csv;
    write_series_csv(csv, *series, trailers);
    run.emit(target, csv.str());
    run.finish(target, std::move(config));
    return kExitOk;
}

SelectionReport run_selection(Run& run, const Series& s, std::size_t max_p, std::size_t l, std::uint64_t seed) {
    EstimationConfig cfg;
    cfg.max_order = max_p;
    cfg.block_half_width = l;
    cfg.rng_seed = seed;
    return select_order(s, cfg, {}, [&](const OrderRecord& r) {
        run.progress("p=" + std::to_string(r.order) + " cv0=" + format_short(r.cv0) + " cvl=" + format_short(r.cvl));
    });
}

int cmd_select(Run& run, const Globals& g, const SelectArgs& a, const OutputTarget& target) {
    if (a.max_p == 0) throw UsageError("--max-p must be at least 1");
    const Series s = run.read_input(a.input);
    const auto report = run_selection(run, s, a.max_p, a.l, g.seed);
    std::ostringstream csv;
    write_selection_csv(csv, report);
    run.emit(target, csv.str());
    run.out() << "chosen_order=" << report.chosen_order << '\n';
    run.finish(target, {{"command", "select"},
                        {"input", a.input},
                        {"max_p", std::to_string(a.max_p)},
                        {"l", std::to_string(a.l)},
                        {"chosen_order", std::to_string(report.chosen_order)}});
    return kExitOk;
}

int cmd_estimate(Run& run, const Globals& g, const EstimateArgs& a, const OutputTarget& target) {
    if (a.automatic == (a.p.has_value() || !a.bandwidths.empty())) {
        throw UsageError("give either --auto or both --p and --bandwidths");
    }
    if (!a.automatic && (!a.p || a.bandwidths.empty())) throw UsageError("--p and --bandwidths go together");
    if (a.window && !(*a.window > 0.0)) throw UsageError("--window must be positive");

    const Series s = run.read_input(a.input);
    Config config{{"command", "estimate"}, {"input", a.input}};
    std::optional<Bandwidths> k;
    if (a.automatic) {
        const auto report = run_selection(run, s, a.max_p, a.l, g.seed);
        k = report.chosen().bandwidths;
        run.out() << "chosen_order=" << report.chosen_order << '\n';
        config.emplace_back("auto", "true");
        config.emplace_back("max_p", std::to_string(a.max_p));
        config.emplace_back("l", std::to_string(a.l));
    } else {
        const auto values = parse_list(a.bandwidths);
        if (values.size() != *a.p + 1) {
            throw UsageError("--bandwidths needs p+1 = " + std::to_string(*a.p + 1) + " values, got " +
                             std::to_string(values.size()));
        }
        try {
            k = Bandwidths::from_table_order(values);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    config.emplace_back("p", std::to_string(k->order()));
    config.emplace_back("bandwidths", join(k->table_order()));

    const auto e = specific_entropy_series(s, *k);
    std::optional<std::vector<std::pair<double, double>>> windowed;
    if (a.window) {
        windowed = windowed_average(e, *a.window);
        config.emplace_back("window", format_full(*a.window));
    }
    std::ostringstream csv;
    write_entropy_csv(csv, s, e, windowed);
    run.emit(target, csv.str());
    run.out() << "time_averaged=" << format_short(time_averaged_rate(e)) << '\n';
    run.finish(target, std::move(config));
    return kExitOk;
}

int cmd_classic(Run& run, const ClassicArgs& a, const OutputTarget& target) {
    const Series s = run.read_input(a.input);
    double r = 0.0;
    if (a.r) {
        r = *a.r;
    } else {
        r = s.size() >= 2 ? 0.2 * sample_std(s.values()) : 0.0;
        if (!(r > 0.0)) throw UsageError("default r = 0.2 * sample std is zero for this input; pass --r");
    }
    if (!(r > 0.0)) throw UsageError("--r must be positive");
    const auto policy = a.skip_isolated ? IsolatedPolicy::Skip : IsolatedPolicy::Error;

    double value = 0.0;
    if (a.estimator == "apen") {
        value = apen(s, a.p, r);
    } else if (a.estimator == "sampen") {
        value = sampen(s, a.p, r);
    } else if (a.estimator == "phi-norm") {
        value = phi_normalized(s, a.p, r);
    } else {
        value = loo_entropy_rate_uniform(s, a.p, r, policy);
    }
    const std::string line =
        a.estimator + "," + std::to_string(a.p) + "," + format_short(r) + "," + format_short(value) + "\n";
    run.out() << line;
    if (!target.output.empty()) run.emit(target, line);
    run.finish(target, {{"command", "classic"},
                        {"input", a.input},
                        {"estimator", a.estimator},
                        {"p", std::to_string(a.p)},
                        {"r", format_full(r)},
                        {"skip_isolated", a.skip_isolated ? "true" : "false"}});
    return kExitOk;
}

std::optional<int> env_threads() {
    const char* v = std::getenv("SPENRA_THREADS");
    if (v == nullptr || *v == '\0') return std::nullopt;
    int n = 0;
    const std::string_view text(v);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr != text.data() + text.size() || n < 1) {
        throw UsageError("SPENRA_THREADS must be a positive integer");
    }
    return n;
}

void add_output_flags(CLI::App* cmd, OutputTarget& target) {
    cmd->add_option("--output,-o", target.output, "Output CSV path (standard output when omitted)");
    cmd->add_option("--manifest", target.manifest, "Manifest path (default <output>.manifest.json)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Specific entropy rate estimation for event series", "spenra"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(SPENRA_VERSION));

    Globals g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker cap (default: SPENRA_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet,-q", g.quiet, "Suppress progress messages");

    GenerateArgs gen;
    OutputTarget gen_out;
    auto* generate = app.add_subcommand("generate", "Write a benchmark series");
    generate->add_option("--system", gen.system, "Benchmark system")
        ->required()
        ->check(CLI::IsMember({"markov2", "lorenz-iei", "rossler-iei", "concat"}));
    generate->add_option("--n", gen.n, "Series length (events)")->capture_default_str();
    generate->add_option("--theta", gen.theta, "Integrate-and-fire threshold")->check(CLI::PositiveNumber);
    generate->add_option("--dt", gen.dt, "RK4 step")->check(CLI::PositiveNumber);
    generate->add_option("--burn-in", gen.burn_in, "Discarded transient duration")->check(CLI::NonNegativeNumber);
    add_output_flags(generate, gen_out);

    SelectArgs sel;
    OutputTarget sel_out;
    auto* select = app.add_subcommand("select", "Choose bandwidths and model order by cross-validation");
    select->add_option("--input,-i", sel.input, "Input series CSV")->required()->check(CLI::ExistingFile);
    select->add_option("--max-p", sel.max_p, "Largest order tried")->capture_default_str();
    select->add_option("--l", sel.l, "Block half-width for order selection")->capture_default_str();
    add_output_flags(select, sel_out);

    EstimateArgs est;
    OutputTarget est_out;
    auto* estimate = app.add_subcommand("estimate", "Specific entropy rate series");
    estimate->add_option("--input,-i", est.input, "Input series CSV")->required()->check(CLI::ExistingFile);
    estimate->add_option("--p", est.p, "Model order")->check(CLI::PositiveNumber);
    estimate->add_option("--bandwidths", est.bandwidths, "k0,k-1,...,k-p");
    estimate->add_flag("--auto", est.automatic, "Run order selection first");
    estimate->add_option("--max-p", est.max_p, "Largest order tried with --auto")->capture_default_str();
    estimate->add_option("--l", est.l, "Block half-width with --auto")->capture_default_str();
    estimate->add_option("--window", est.window, "Moving-average window in time units");
    add_output_flags(estimate, est_out);

    ClassicArgs cls;
    OutputTarget cls_out;
    auto* classic = app.add_subcommand("classic", "Approximate-entropy family estimators");
    classic->add_option("--input,-i", cls.input, "Input series CSV")->required()->check(CLI::ExistingFile);
    classic->add_option("--estimator", cls.estimator, "Estimator")
        ->required()
        ->check(CLI::IsMember({"apen", "sampen", "phi-norm", "loo-rate"}));
    classic->add_option("--p", cls.p, "Embedding dimension")->capture_default_str();
    classic->add_option("--r", cls.r, "Tolerance (default 0.2 * sample std)");
    classic->add_flag("--skip-isolated", cls.skip_isolated, "Drop vectors without neighbours (loo-rate)");
    add_output_flags(classic, cls_out);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const auto threads = g.threads ? g.threads : env_threads();
        set_thread_limit(threads.value_or(0));
        Run run(args, g, out, err);
        if (*generate) return cmd_generate(run, g, gen, gen_out);
        if (*select) return cmd_select(run, g, sel, sel_out);
        if (*estimate) return cmd_estimate(run, g, est, est_out);
        return cmd_classic(run, cls, cls_out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}

}  // namespace spenra::cli
