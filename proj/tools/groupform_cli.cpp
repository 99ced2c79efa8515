// groupform command-line tool. Talks to the engine exclusively through the C
// interface in groupform.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "groupform/groupform.h"

namespace {

struct ScenarioDeleter {
    void operator()(gf_scenario* s) const { gf_scenario_free(s); }
};
struct TraceDeleter {
    void operator()(gf_trace* t) const { gf_trace_free(t); }
};
struct SweepDeleter {
    void operator()(gf_sweep* s) const { gf_sweep_free(s); }
};
struct StringDeleter {
    void operator()(char* s) const { gf_string_free(s); }
};

using ScenarioPtr = std::unique_ptr<gf_scenario, ScenarioDeleter>;
using TracePtr = std::unique_ptr<gf_trace, TraceDeleter>;
using SweepPtr = std::unique_ptr<gf_sweep, SweepDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Thrown to unwind with a status code after the message has been printed.
struct Exit {
    int code;
};

void check(gf_status status, const std::string& context) {
    if (status != GF_OK) {
        std::cerr << "groupform: " << context << ": " << gf_last_error() << "\n";
        throw Exit{static_cast<int>(status)};
    }
}

std::string take(char* s) {
    StringPtr owned(s);
    return owned ? std::string(owned.get()) : std::string();
}

std::filesystem::path default_out_dir() {
    if (const char* env = std::getenv("GROUPFORM_OUT_DIR"); env && *env) return env;
    return ".";
}

std::filesystem::path out_dir(const std::string& flag) {
    return flag.empty() ? default_out_dir() : std::filesystem::path(flag);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        std::cerr << "groupform: cannot write " << path.string() << "\n";
        throw Exit{GF_ERR_IO};
    }
}

ScenarioPtr load_scenario(const std::string& path) {
    gf_scenario* raw = nullptr;
    check(gf_scenario_load(path.c_str(), &raw), "loading scenario " + path);
    return ScenarioPtr(raw);
}

TracePtr load_trace(const std::string& path) {
    gf_trace* raw = nullptr;
    check(gf_trace_load(path.c_str(), &raw), "loading trace " + path);
    return TracePtr(raw);
}

gf_config make_config(const gf_scenario* scenario, std::optional<std::size_t> k, double lambda) {
    gf_config cfg = gf_config_default();
    cfg.k = k.value_or(gf_scenario_k(scenario));
    cfg.lambda = lambda;
    return cfg;
}

// --- subcommands -------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::uint64_t seed = 0;
    std::uint64_t max_iterations = 0;
    double lambda = 1.0;
    std::optional<std::size_t> k;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    auto scenario = load_scenario(a.scenario);
    const gf_config cfg = make_config(scenario.get(), a.k, a.lambda);
    gf_trace* raw = nullptr;
    check(gf_simulate(scenario.get(), &cfg, a.seed, a.max_iterations, &raw), "simulating");
    TracePtr trace(raw);

    const std::filesystem::path dir = out_dir(a.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto trace_path = dir / "trace.jsonl";
    check(gf_trace_save(trace.get(), trace_path.string().c_str()), "writing trace");

    char* metrics = nullptr;
    check(gf_trace_metrics_json(trace.get(), &metrics), "computing metrics");
    std::cout << take(metrics);
    if (!gf_trace_converged(trace.get())) {
        std::cerr << "groupform: no equilibrium within " << gf_trace_iterations(trace.get())
                  << " iterations; partial trace written to " << trace_path.string() << "\n";
        return GF_ERR_NOT_CONVERGED;
    }
    return GF_OK;
}

struct GenerateArgs {
    std::size_t m = 5;
    std::size_t k = 3;
    double x_max = 10.0;
    std::optional<double> y_max;
    double r_max = 20.0;
    std::uint64_t seed = 0;
    bool integer_resources = false;
    std::string out;
};

int run_generate(const GenerateArgs& a) {
    gf_scenario_params p = gf_scenario_params_default();
    p.m = a.m;
    p.k = a.k;
    p.x_max = a.x_max;
    p.y_max = a.y_max.value_or(a.x_max);
    p.r_max = a.r_max;
    p.seed = a.seed;
    p.integer_resources = a.integer_resources ? 1 : 0;
    gf_scenario* raw = nullptr;
    check(gf_scenario_generate(&p, &raw), "generating scenario");
    ScenarioPtr scenario(raw);
    const std::filesystem::path path =
        a.out.empty() ? default_out_dir() / "scenario.json" : std::filesystem::path(a.out);
    check(gf_scenario_save(scenario.get(), path.string().c_str()), "writing scenario");
    std::cout << path.string() << "\n";
    return GF_OK;
}

struct SweepArgs {
    std::vector<double> x_max{1, 10, 20, 40, 60, 80, 100};
    std::vector<double> r_max{1, 20, 40, 60, 80, 100};
    std::size_t replications = 200;
    std::uint64_t seed = 0;
    std::size_t m = 5;
    std::size_t k = 3;
    double lambda = 1.0;
    bool integer_resources = false;
    std::uint64_t max_iterations = 0;
    std::size_t threads = 0;
    std::string out;
};

int run_sweep(const SweepArgs& a) {
    gf_sweep_params p = gf_sweep_params_default();
    p.x_max_list = a.x_max.data();
    p.x_max_count = a.x_max.size();
    p.r_max_list = a.r_max.data();
    p.r_max_count = a.r_max.size();
    p.replications = a.replications;
    p.base_seed = a.seed;
    p.m = a.m;
    p.config.k = a.k;
    p.config.lambda = a.lambda;
    p.integer_resources = a.integer_resources ? 1 : 0;
    p.max_iterations = a.max_iterations;
    p.threads = a.threads;
    gf_sweep* raw = nullptr;
    check(gf_sweep_run(&p, &raw), "running sweep");
    SweepPtr sweep(raw);

    const std::filesystem::path dir = out_dir(a.out);
    char* csv = nullptr;
    check(gf_sweep_csv(sweep.get(), &csv), "formatting CSV");
    write_text(dir / "sweep.csv", take(csv));
    char* js = nullptr;
    check(gf_sweep_json(sweep.get(), &js), "formatting JSON");
    write_text(dir / "sweep.json", take(js));
    char* report = nullptr;
    check(gf_sweep_trend_report(sweep.get(), &report), "computing trends");
    const std::string text = take(report);
    write_text(dir / "trends.json", text);
    std::cout << text;
    return GF_OK;
}

struct VerifyArgs {
    std::string scenario;
    std::string partition;
    std::string trace;
    double lambda = 1.0;
    std::optional<std::size_t> k;
};

int run_verify(const VerifyArgs& a) {
    if (a.partition.empty() == a.trace.empty()) {
        std::cerr << "groupform: verify needs exactly one of --partition or --trace\n";
        return GF_ERR_USAGE;
    }
    auto scenario = load_scenario(a.scenario);
    const gf_config cfg = make_config(scenario.get(), a.k, a.lambda);
    const std::string& path = a.partition.empty() ? a.trace : a.partition;
    char* report = nullptr;
    int is_ise = 0;
    check(gf_verify_file(scenario.get(), &cfg, path.c_str(), &report, &is_ise), "verifying " + path);
    std::cout << take(report);
    return is_ise ? GF_OK : GF_ERR_NOT_ISE;
}

struct RenderArgs {
    std::string trace;
    std::vector<std::uint64_t> iterations;
    bool keyframes = false;
    int canvas = 600;
    bool no_legend = false;
    std::string out;
};

int run_render(const RenderArgs& a) {
    auto trace = load_trace(a.trace);
    gf_render_spec spec = gf_render_spec_default();
    spec.keyframes = a.iterations.empty() || a.keyframes ? 1 : 0;
    spec.iterations = a.iterations.data();
    spec.iteration_count = a.iterations.size();
    spec.canvas = a.canvas;
    spec.legend = a.no_legend ? 0 : 1;
    const std::filesystem::path dir = out_dir(a.out);
    std::size_t written = 0;
    check(gf_render(trace.get(), &spec, dir.string().c_str(), &written), "rendering");
    std::cout << "wrote " << written << " frame(s) to " << dir.string() << "\n";
    return GF_OK;
}

struct ReplayArgs {
    std::string trace;
    std::string scenario;
};

int run_replay(const ReplayArgs& a) {
    auto trace = load_trace(a.trace);
    ScenarioPtr scenario;
    if (!a.scenario.empty()) scenario = load_scenario(a.scenario);
    char* report = nullptr;
    const gf_status st = gf_trace_replay(trace.get(), scenario.get(), &report);
    const std::string text = take(report);
    std::cout << text;
    check(st, "replaying " + a.trace);
    return GF_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial group-formation game: simulation, verification and sweeps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(gf_version()));

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run the improvement dynamics to an equilibrium");
    simulate->add_option("--scenario", sim.scenario, "scenario JSON file")->required();
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--max-iterations", sim.max_iterations,
                         "attempt budget (default 10 n (n + 1))");
    simulate->add_option("--lambda", sim.lambda, "distance decay");
    simulate->add_option("--k", sim.k, "category count (must match the scenario)");
    simulate->add_option("--out", sim.out, "output directory (default $GROUPFORM_OUT_DIR or .)");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "write a random scenario");
    generate->add_option("--m", gen.m, "agents per category");
    generate->add_option("--k", gen.k, "category count");
    generate->add_option("--x-max", gen.x_max, "location range along x");
    generate->add_option("--y-max", gen.y_max, "location range along y (default x-max)");
    generate->add_option("--r-max", gen.r_max, "upper bound of individual resources");
    generate->add_option("--seed", gen.seed, "RNG seed");
    generate->add_flag("--integer-resources", gen.integer_resources, "integer resources");
    generate->add_option("--out", gen.out, "output file (default <out dir>/scenario.json)");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "run the (x_max, r_max) grid");
    sweep->add_option("--x-max", sw.x_max, "location ranges")->delimiter(',');
    sweep->add_option("--r-max", sw.r_max, "resource ranges")->delimiter(',');
    sweep->add_option("--replications", sw.replications, "runs per grid cell");
    sweep->add_option("--seed", sw.seed, "base seed");
    sweep->add_option("--m", sw.m, "agents per category");
    sweep->add_option("--k", sw.k, "category count");
    sweep->add_option("--lambda", sw.lambda, "distance decay");
    sweep->add_flag("--integer-resources", sw.integer_resources, "integer resources");
    sweep->add_option("--max-iterations", sw.max_iterations, "attempt budget per run");
    sweep->add_option("--threads", sw.threads, "worker threads (0 = all cores)");
    sweep->add_option("--out", sw.out, "output directory");

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "check a partition for individual stability");
    verify->add_option("--scenario", ver.scenario, "scenario JSON file")->required();
    verify->add_option("--partition", ver.partition, "partition JSON file");
    verify->add_option("--trace", ver.trace, "trace file (its final partition is checked)");
    verify->add_option("--lambda", ver.lambda, "distance decay");
    verify->add_option("--k", ver.k, "category count (must match the scenario)");

    RenderArgs ren;
    auto* render = app.add_subcommand("render", "draw trace snapshots as SVG");
    render->add_option("--trace", ren.trace, "trace file")->required();
    auto* iters = render->add_option("--iterations", ren.iterations,
                                     "iterations to draw (0 = initialization)")
                      ->delimiter(',');
    render->add_flag("--keyframes", ren.keyframes, "draw the keyframes (default)")->excludes(iters);
    render->add_option("--canvas", ren.canvas, "canvas size in pixels");
    render->add_flag("--no-legend", ren.no_legend, "omit the category legend");
    render->add_option("--out", ren.out, "output directory");

    ReplayArgs rep;
    auto* replay = app.add_subcommand("replay", "re-run a trace and check it reproduces");
    replay->add_option("--trace", rep.trace, "trace file")->required();
    replay->add_option("--scenario", rep.scenario, "scenario file to check against the trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return GF_ERR_USAGE;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*generate) return run_generate(gen);
        if (*sweep) return run_sweep(sw);
        if (*verify) return run_verify(ver);
        if (*render) return run_render(ren);
        if (*replay) return run_replay(rep);
    } catch (const Exit& e) {
        return e.code;
    }
    return GF_ERR_USAGE;
}
