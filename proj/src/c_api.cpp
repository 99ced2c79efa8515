#include "groupform/groupform.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "groupform/dynamics.hpp"
#include "groupform/experiments.hpp"
#include "groupform/oracle.hpp"
#include "groupform/persistence.hpp"
#include "groupform/render.hpp"

struct gf_scenario {
    groupform::ScenarioFile file;
};

struct gf_trace {
    groupform::TraceFile file;
};

struct gf_sweep {
    groupform::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

gf_status fail(gf_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

/// Runs `body`, translating exceptions into status codes.
template <typename Body>
gf_status guarded(Body&& body) {
    g_last_error.clear();
    try {
        return body();
    } catch (const groupform::IoError& e) {
        return fail(GF_ERR_IO, e.what());
    } catch (const groupform::IntegrityError& e) {
        return fail(GF_ERR_INTEGRITY, e.what());
    } catch (const groupform::ValidationError& e) {
        return fail(GF_ERR_VALIDATION, e.what());
    } catch (const groupform::ArgumentError& e) {
        return fail(GF_ERR_USAGE, e.what());
    } catch (const groupform::ParameterError& e) {
        return fail(GF_ERR_USAGE, e.what());
    } catch (const groupform::ModelError& e) {
        return fail(GF_ERR_VALIDATION, e.what());
    } catch (const std::exception& e) {
        return fail(GF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(GF_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

gf_status null_arg(const char* name) {
    return fail(GF_ERR_USAGE, std::string("null argument: ") + name);
}

groupform::GameConfig to_config(const gf_config* cfg, const groupform::Scenario& scenario) {
    groupform::GameConfig out;
    out.k = scenario.k();
    if (cfg) {
        out.k = cfg->k;
        out.distance_decay = cfg->lambda;
    }
    out.validate();
    if (out.k != scenario.k()) {
        throw groupform::ValidationError(
            groupform::ValidationCode::ConfigMismatch,
            "config k = " + std::to_string(out.k) + " but scenario k = " +
                std::to_string(scenario.k()));
    }
    return out;
}

}  // namespace

extern "C" {

const char* gf_version(void) {
    static const std::string v(groupform::kEngineVersion);
    return v.c_str();
}

const char* gf_last_error(void) { return g_last_error.c_str(); }

void gf_string_free(char* s) { std::free(s); }

gf_config gf_config_default(void) { return gf_config{3, 1.0}; }

gf_scenario_params gf_scenario_params_default(void) {
    return gf_scenario_params{5, 3, 10.0, 10.0, 20.0, 0, 0};
}

gf_sweep_params gf_sweep_params_default(void) {
    static const double xs[] = {1, 10, 20, 40, 60, 80, 100};
    static const double rs[] = {1, 20, 40, 60, 80, 100};
    gf_sweep_params p{};
    p.x_max_list = xs;
    p.x_max_count = std::size(xs);
    p.r_max_list = rs;
    p.r_max_count = std::size(rs);
    p.replications = 200;
    p.base_seed = 0;
    p.m = 5;
    p.config = gf_config_default();
    p.integer_resources = 0;
    p.max_iterations = 0;
    p.iteration_threshold = 200;
    p.threads = 1;
    return p;
}

gf_render_spec gf_render_spec_default(void) { return gf_render_spec{nullptr, 0, 1, 600, 1}; }

// --- scenarios -------------------------------------------------------------

gf_status gf_scenario_load(const char* path, gf_scenario** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new gf_scenario{groupform::load_scenario(path)};
        return GF_OK;
    });
}

gf_status gf_scenario_parse(const char* text, gf_scenario** out) {
    if (!text) return null_arg("text");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new gf_scenario{groupform::scenario_from_string(text)};
        return GF_OK;
    });
}

gf_status gf_scenario_generate(const gf_scenario_params* params, gf_scenario** out) {
    if (!params) return null_arg("params");
    if (!out) return null_arg("out");
    return guarded([&] {
        groupform::ScenarioParams p;
        p.m = params->m;
        p.k = params->k;
        p.x_max = params->x_max;
        p.y_max = params->y_max;
        p.r_max = params->r_max;
        p.seed = params->seed;
        p.integer_resources = params->integer_resources != 0;
        *out = new gf_scenario{{groupform::generate_scenario(p), groupform::Provenance{p}}};
        return GF_OK;
    });
}

gf_status gf_scenario_save(const gf_scenario* scenario, const char* path) {
    if (!scenario) return null_arg("scenario");
    if (!path) return null_arg("path");
    return guarded([&] {
        groupform::save_scenario(path, scenario->file);
        return GF_OK;
    });
}

size_t gf_scenario_size(const gf_scenario* scenario) {
    return scenario ? scenario->file.scenario.size() : 0;
}

size_t gf_scenario_k(const gf_scenario* scenario) {
    return scenario ? scenario->file.scenario.k() : 0;
}

gf_status gf_scenario_agent(const gf_scenario* scenario, size_t index, gf_agent* out) {
    if (!scenario) return null_arg("scenario");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto& a = scenario->file.scenario.at(index);
        *out = gf_agent{a.id, a.category.index, a.resource, a.position.x, a.position.y};
        return GF_OK;
    });
}

gf_status gf_scenario_digest(const gf_scenario* scenario, char** out) {
    if (!scenario) return null_arg("scenario");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(groupform::scenario_digest(scenario->file.scenario));
        return GF_OK;
    });
}

void gf_scenario_free(gf_scenario* scenario) { delete scenario; }

gf_status gf_group_log_utility(const gf_scenario* scenario, const gf_config* config,
                               const size_t* members, size_t count, double* out) {
    if (!scenario) return null_arg("scenario");
    if (!members || count == 0) return fail(GF_ERR_USAGE, "group must be nonempty");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto cfg = to_config(config, scenario->file.scenario);
        const std::vector<groupform::AgentId> ids(members, members + count);
        *out = groupform::log_group_utility(ids, scenario->file.scenario, cfg);
        return GF_OK;
    });
}

gf_status gf_boosting_factor(const double* totals, size_t k, double* out) {
    if (!totals || k == 0) return null_arg("totals");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = groupform::boosting_factor(std::span<const double>(totals, k));
        return GF_OK;
    });
}

// --- traces ----------------------------------------------------------------

gf_status gf_simulate(const gf_scenario* scenario, const gf_config* config, uint64_t seed,
                      uint64_t max_iterations, gf_trace** out) {
    if (!scenario) return null_arg("scenario");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto& s = scenario->file.scenario;
        const auto cfg = to_config(config, s);
        const auto budget = max_iterations ? max_iterations : groupform::default_max_iterations(s.size());
        auto trace = groupform::run_to_convergence(s, cfg, seed, budget);
        *out = new gf_trace{groupform::make_trace_file(s, std::move(trace))};
        return GF_OK;
    });
}

gf_status gf_trace_load(const char* path, gf_trace** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new gf_trace{groupform::load_trace(path)};
        return GF_OK;
    });
}

gf_status gf_trace_save(const gf_trace* trace, const char* path) {
    if (!trace) return null_arg("trace");
    if (!path) return null_arg("path");
    return guarded([&] {
        groupform::save_trace(path, trace->file);
        return GF_OK;
    });
}

int gf_trace_converged(const gf_trace* trace) { return trace && trace->file.trace.converged; }

uint64_t gf_trace_iterations(const gf_trace* trace) {
    return trace ? trace->file.trace.total_iterations : 0;
}

uint64_t gf_trace_seed(const gf_trace* trace) { return trace ? trace->file.trace.seed : 0; }

gf_status gf_trace_final_partition_json(const gf_trace* trace, char** out) {
    if (!trace) return null_arg("trace");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(
            groupform::partition_to_string(trace->file.trace.final_partition.canonical()));
        return GF_OK;
    });
}

gf_status gf_trace_metrics_json(const gf_trace* trace, char** out) {
    if (!trace) return null_arg("trace");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(groupform::metrics_to_json(
            groupform::equilibrium_metrics(trace->file.trace, trace->file.scenario)));
        return GF_OK;
    });
}

gf_status gf_trace_scenario(const gf_trace* trace, gf_scenario** out) {
    if (!trace) return null_arg("trace");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new gf_scenario{{trace->file.scenario, std::nullopt}};
        return GF_OK;
    });
}

gf_status gf_trace_replay(const gf_trace* trace, const gf_scenario* scenario, char** report) {
    if (!trace) return null_arg("trace");
    if (!report) return null_arg("report");
    return guarded([&] {
        const auto& recorded = trace->file;
        nlohmann::json r;
        r["scenario_digest"] = recorded.trace.scenario_digest;
        if (scenario) {
            const auto digest = groupform::scenario_digest(scenario->file.scenario);
            r["provided_scenario_digest"] = digest;
            if (digest != recorded.trace.scenario_digest) {
                *report = dup_string(r.dump() + "\n");
                return fail(GF_ERR_INTEGRITY, "scenario digest " + digest +
                                                  " does not match trace digest " +
                                                  recorded.trace.scenario_digest);
            }
        }
        auto rerun = groupform::run_to_convergence(recorded.scenario, recorded.trace.config,
                                                   recorded.trace.seed,
                                                   recorded.trace.max_iterations);
        const auto again = groupform::make_trace_file(recorded.scenario, std::move(rerun));
        const bool identical = again == recorded;
        const bool bytes_identical =
            groupform::trace_to_string(again) == groupform::trace_to_string(recorded);
        r["events"] = recorded.trace.events.size();
        r["converged"] = recorded.trace.converged;
        r["identical"] = identical && bytes_identical;
        if (!identical || !bytes_identical) {
            std::size_t first = 0;
            const auto& a = again.trace.events;
            const auto& b = recorded.trace.events;
            while (first < a.size() && first < b.size() && a[first] == b[first]) ++first;
            r["first_divergent_event"] = first;
        }
        *report = dup_string(r.dump() + "\n");
        if (!identical || !bytes_identical) {
            return fail(GF_ERR_INTEGRITY, "re-running the engine did not reproduce the trace");
        }
        return GF_OK;
    });
}

void gf_trace_free(gf_trace* trace) { delete trace; }

// --- verification ----------------------------------------------------------

namespace {

gf_status verify_text(const gf_scenario* scenario, const gf_config* config, const std::string& text,
                      char** report, int* is_ise) {
    const auto& s = scenario->file.scenario;
    const auto cfg = to_config(config, s);
    groupform::Partition partition;
    if (groupform::looks_like_trace(text)) {
        auto tf = groupform::trace_from_string(text);
        if (tf.trace.scenario_digest != groupform::scenario_digest(s)) {
            return fail(GF_ERR_INTEGRITY, "trace was produced from a different scenario (digest " +
                                              tf.trace.scenario_digest + ")");
        }
        partition = tf.trace.final_partition;
    } else {
        partition = groupform::partition_from_string(text, s.size());
    }
    const auto r = groupform::verify_ise(partition, s, cfg);
    *report = dup_string(groupform::ise_report_to_json(r));
    if (is_ise) *is_ise = r.is_ise ? 1 : 0;
    return GF_OK;
}

}  // namespace

gf_status gf_verify_file(const gf_scenario* scenario, const gf_config* config,
                         const char* partition_path, char** report, int* is_ise) {
    if (!scenario) return null_arg("scenario");
    if (!partition_path) return null_arg("partition_path");
    if (!report) return null_arg("report");
    return guarded([&] {
        return verify_text(scenario, config, groupform::read_file(partition_path), report, is_ise);
    });
}

gf_status gf_verify_partition_json(const gf_scenario* scenario, const gf_config* config,
                                   const char* partition_json, char** report, int* is_ise) {
    if (!scenario) return null_arg("scenario");
    if (!partition_json) return null_arg("partition_json");
    if (!report) return null_arg("report");
    return guarded([&] { return verify_text(scenario, config, partition_json, report, is_ise); });
}

// --- rendering -------------------------------------------------------------

gf_status gf_render(const gf_trace* trace, const gf_render_spec* spec, const char* out_dir,
                    size_t* frames_written) {
    if (!trace) return null_arg("trace");
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        groupform::RenderSpec rs;
        if (spec) {
            rs.keyframes = spec->keyframes != 0;
            if (!rs.keyframes) {
                if (!spec->iterations && spec->iteration_count) {
                    throw groupform::ArgumentError("iteration list is null");
                }
                rs.iterations.assign(spec->iterations, spec->iterations + spec->iteration_count);
            }
            rs.canvas = spec->canvas;
            rs.legend = spec->legend != 0;
        }
        const auto frames = groupform::render_trace(trace->file, rs);
        const std::filesystem::path dir(out_dir);
        for (const auto& f : frames) groupform::write_file(dir / f.file_name, f.svg);
        if (frames_written) *frames_written = frames.size();
        return GF_OK;
    });
}

// --- sweeps ----------------------------------------------------------------

gf_status gf_sweep_run(const gf_sweep_params* params, gf_sweep** out) {
    if (!params) return null_arg("params");
    if (!out) return null_arg("out");
    if ((!params->x_max_list && params->x_max_count) || (!params->r_max_list && params->r_max_count)) {
        return null_arg("grid list");
    }
    return guarded([&] {
        groupform::SweepParams p;
        p.x_max_list.assign(params->x_max_list, params->x_max_list + params->x_max_count);
        p.r_max_list.assign(params->r_max_list, params->r_max_list + params->r_max_count);
        p.replications = params->replications;
        p.base_seed = params->base_seed;
        p.m = params->m;
        p.cfg.k = params->config.k;
        p.cfg.distance_decay = params->config.lambda;
        p.integer_resources = params->integer_resources != 0;
        p.max_iterations = params->max_iterations;
        p.iteration_threshold = params->iteration_threshold;
        p.threads = params->threads;
        *out = new gf_sweep{groupform::run_sweep(p)};
        return GF_OK;
    });
}

gf_status gf_sweep_csv(const gf_sweep* sweep, char** out) {
    if (!sweep) return null_arg("sweep");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(groupform::sweep_to_csv(sweep->result));
        return GF_OK;
    });
}

gf_status gf_sweep_json(const gf_sweep* sweep, char** out) {
    if (!sweep) return null_arg("sweep");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(groupform::sweep_to_json(sweep->result));
        return GF_OK;
    });
}

gf_status gf_sweep_trend_report(const gf_sweep* sweep, char** out) {
    if (!sweep) return null_arg("sweep");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = dup_string(groupform::trend_report_to_json(groupform::trend_checks(sweep->result)));
        return GF_OK;
    });
}

void gf_sweep_free(gf_sweep* sweep) { delete sweep; }

}  // extern "C"
