#include "groupform/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace groupform {

using json = nlohmann::json;

const char* to_string(ValidationCode code) noexcept {
    switch (code) {
        case ValidationCode::Malformed: return "malformed record";
        case ValidationCode::UnsupportedVersion: return "unsupported format version";
        case ValidationCode::EmptyAgentList: return "empty agent list";
        case ValidationCode::DuplicateId: return "duplicate agent id";
        case ValidationCode::NonDenseIds: return "agent ids not dense";
        case ValidationCode::NonpositiveResource: return "nonpositive resource";
        case ValidationCode::CategoryOutOfRange: return "category out of range";
        case ValidationCode::InvalidCategoryCount: return "invalid category count";
        case ValidationCode::InvalidPartition: return "invalid partition";
        case ValidationCode::ConfigMismatch: return "config mismatch";
    }
    return "validation error";
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading " + path.string());
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("error while writing " + path.string());
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw ValidationError(ValidationCode::Malformed, what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) malformed(where + " is not an object");
    auto it = obj.find(key);
    if (it == obj.end()) malformed(where + " is missing field '" + key + "'");
    return *it;
}

double number_field(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number()) malformed(where + " field '" + key + "' must be a number");
    return v.get<double>();
}

std::uint64_t unsigned_field(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number_unsigned()) {
        malformed(where + " field '" + key + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

bool bool_field(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_boolean()) malformed(where + " field '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_string()) malformed(where + " field '" + key + "' must be a string");
    return v.get<std::string>();
}

void check_version(const json& obj, const std::string& where) {
    const auto v = unsigned_field(obj, "format_version", where);
    if (v != kFormatVersion) {
        throw ValidationError(ValidationCode::UnsupportedVersion,
                              where + " has format_version " + std::to_string(v) +
                                  ", expected " + std::to_string(kFormatVersion));
    }
}

json parse_json(std::string_view text, const std::string& where) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        malformed(where + ": " + e.what());
    }
}

json agents_to_json(const Scenario& s) {
    json agents = json::array();
    for (const Agent& a : s.agents()) {
        agents.push_back({{"id", a.id},
                          {"category", a.category.index},
                          {"resource", a.resource},
                          {"x", a.position.x},
                          {"y", a.position.y}});
    }
    return agents;
}

json scenario_body(const Scenario& s) {
    return {{"k", s.k()}, {"agents", agents_to_json(s)}};
}

Scenario scenario_from_json(const json& obj, const std::string& where) {
    const auto k = unsigned_field(obj, "k", where);
    if (k < 2) {
        throw ValidationError(ValidationCode::InvalidCategoryCount,
                              where + " field 'k' must be at least 2, got " + std::to_string(k));
    }
    const json& list = field(obj, "agents", where);
    if (!list.is_array()) malformed(where + " field 'agents' must be an array");
    if (list.empty()) {
        throw ValidationError(ValidationCode::EmptyAgentList, where + " has no agents");
    }
    std::vector<Agent> agents;
    agents.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string at = where + " agents[" + std::to_string(i) + "]";
        Agent a;
        a.id = unsigned_field(list[i], "id", at);
        const json& cat = field(list[i], "category", at);
        if (!cat.is_number_integer()) malformed(at + " field 'category' must be an integer");
        a.resource = number_field(list[i], "resource", at);
        a.position.x = number_field(list[i], "x", at);
        a.position.y = number_field(list[i], "y", at);
        if (cat.is_number_unsigned() ? cat.get<std::uint64_t>() >= k : true) {
            throw ValidationError(ValidationCode::CategoryOutOfRange,
                                  at + " field 'category' = " + cat.dump() + " is outside [0, " +
                                      std::to_string(k) + ")");
        }
        a.category.index = cat.get<std::uint64_t>();
        if (!(a.resource > 0.0)) {
            throw ValidationError(ValidationCode::NonpositiveResource,
                                  at + " field 'resource' = " + format_double(a.resource) +
                                      " must be > 0");
        }
        agents.push_back(a);
    }
    std::sort(agents.begin(), agents.end(),
              [](const Agent& l, const Agent& r) { return l.id < r.id; });
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (i > 0 && agents[i].id == agents[i - 1].id) {
            throw ValidationError(ValidationCode::DuplicateId,
                                  where + " agent id " + std::to_string(agents[i].id) +
                                      " appears more than once");
        }
        if (agents[i].id != i) {
            throw ValidationError(ValidationCode::NonDenseIds,
                                  where + " agent ids must be 0.." +
                                      std::to_string(agents.size() - 1) + ", missing " +
                                      std::to_string(i));
        }
    }
    try {
        return Scenario(k, std::move(agents));
    } catch (const ModelError& e) {
        malformed(where + ": " + e.what());
    }
}

json groups_to_json(const Groups& groups) {
    json out = json::array();
    for (const auto& g : groups) out.push_back(g);
    return out;
}

Groups groups_from_json(const json& v, const std::string& where) {
    if (!v.is_array()) malformed(where + " must be an array of groups");
    Groups groups;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array()) malformed(where + "[" + std::to_string(i) + "] must be an array");
        std::vector<AgentId> g;
        for (const auto& id : v[i]) {
            if (!id.is_number_unsigned()) {
                malformed(where + "[" + std::to_string(i) + "] holds a non-integer id");
            }
            g.push_back(id.get<AgentId>());
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

Partition checked_partition(const Groups& groups, std::size_t n, const std::string& where) {
    try {
        return Partition::from_groups(groups, n);
    } catch (const ModelError& e) {
        throw ValidationError(ValidationCode::InvalidPartition, where + ": " + e.what());
    }
}

json move_to_json(const MoveOption& m) {
    json j = {{"kind", to_string(m.kind)},
              {"target", m.target},
              {"mover_new_log_utility", m.mover_new_log_utility}};
    if (m.target_old_log_utility) j["target_old_log_utility"] = *m.target_old_log_utility;
    if (m.target_new_log_utility) j["target_new_log_utility"] = *m.target_new_log_utility;
    return j;
}

MoveOption move_from_json(const json& j, const std::string& where) {
    MoveOption m;
    const auto kind = string_field(j, "kind", where);
    if (kind == "join") {
        m.kind = MoveKind::Join;
    } else if (kind == "singleton") {
        m.kind = MoveKind::FormSingleton;
    } else if (kind == "stay") {
        m.kind = MoveKind::Stay;
    } else {
        malformed(where + " has unknown move kind '" + kind + "'");
    }
    m.target = unsigned_field(j, "target", where);
    m.mover_new_log_utility = number_field(j, "mover_new_log_utility", where);
    if (j.contains("target_old_log_utility")) {
        m.target_old_log_utility = number_field(j, "target_old_log_utility", where);
    }
    if (j.contains("target_new_log_utility")) {
        m.target_new_log_utility = number_field(j, "target_new_log_utility", where);
    }
    return m;
}

json config_to_json(const GameConfig& cfg) {
    return {{"k", cfg.k}, {"lambda", cfg.distance_decay}};
}

GameConfig config_from_json(const json& j, const std::string& where) {
    GameConfig cfg;
    cfg.k = unsigned_field(j, "k", where);
    cfg.distance_decay = number_field(j, "lambda", where);
    return cfg;
}

json metrics_json(const EquilibriumMetrics& m) {
    return {{"num_groups", m.num_groups},
            {"mean_group_size", m.mean_group_size},
            {"mean_sectors_per_group", m.mean_sectors_per_group},
            {"iterations", m.iterations},
            {"converged", m.converged}};
}

json potential_json(const PotentialStats& p) {
    return {{"increases", p.increases}, {"equal", p.equal}, {"decreases", p.decreases}};
}

PotentialStats potential_from_json(const json& j, const std::string& where) {
    return {unsigned_field(j, "increases", where), unsigned_field(j, "equal", where),
            unsigned_field(j, "decreases", where)};
}

PotentialChange change_from_string(const std::string& s, const std::string& where) {
    if (s == "increase") return PotentialChange::Increase;
    if (s == "equal") return PotentialChange::Equal;
    if (s == "decrease") return PotentialChange::Decrease;
    malformed(where + " has unknown potential change '" + s + "'");
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario

std::string scenario_digest(const Scenario& scenario) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(scenario_body(scenario).dump())));
    return std::string("fnv1a64:") + hex;
}

std::string scenario_to_string(const ScenarioFile& file) {
    json j = scenario_body(file.scenario);
    j["format_version"] = kFormatVersion;
    if (file.provenance) {
        const auto& p = file.provenance->params;
        j["provenance"] = {{"m", p.m},
                           {"k", p.k},
                           {"x_max", p.x_max},
                           {"y_max", p.y_max},
                           {"r_max", p.r_max},
                           {"seed", p.seed},
                           {"integer_resources", p.integer_resources}};
    }
    return j.dump(2) + "\n";
}

ScenarioFile scenario_from_string(std::string_view text) {
    const json j = parse_json(text, "scenario");
    check_version(j, "scenario");
    ScenarioFile file;
    file.scenario = scenario_from_json(j, "scenario");
    if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
        const std::string at = "scenario provenance";
        Provenance p;
        p.params.m = unsigned_field(*it, "m", at);
        p.params.k = unsigned_field(*it, "k", at);
        p.params.x_max = number_field(*it, "x_max", at);
        p.params.y_max = number_field(*it, "y_max", at);
        p.params.r_max = number_field(*it, "r_max", at);
        p.params.seed = unsigned_field(*it, "seed", at);
        p.params.integer_resources = bool_field(*it, "integer_resources", at);
        file.provenance = p;
    }
    return file;
}

void save_scenario(const std::filesystem::path& path, const ScenarioFile& file) {
    write_file(path, scenario_to_string(file));
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    return scenario_from_string(read_file(path));
}

// ---------------------------------------------------------------------------
// Partition

std::string partition_to_string(const Groups& groups) {
    json j = {{"format_version", kFormatVersion}, {"groups", groups_to_json(groups)}};
    return j.dump() + "\n";
}

Partition partition_from_string(std::string_view text, std::size_t agent_count) {
    const json j = parse_json(text, "partition");
    check_version(j, "partition");
    const Groups groups = groups_from_json(field(j, "groups", "partition"), "partition groups");
    return checked_partition(groups, agent_count, "partition");
}

void save_partition(const std::filesystem::path& path, const Groups& groups) {
    write_file(path, partition_to_string(groups));
}

Partition load_partition(const std::filesystem::path& path, std::size_t agent_count) {
    return partition_from_string(read_file(path), agent_count);
}

// ---------------------------------------------------------------------------
// Trace

TraceFile make_trace_file(const Scenario& scenario, SimTrace trace) {
    TraceFile file;
    file.scenario = scenario;
    trace.scenario_digest = scenario_digest(scenario);
    file.trace = std::move(trace);
    return file;
}

std::string trace_to_string(const TraceFile& file) {
    const SimTrace& t = file.trace;
    std::string out;
    json header = {{"type", "header"},
                   {"format_version", kFormatVersion},
                   {"engine_version", file.engine_version},
                   {"scenario_digest", t.scenario_digest},
                   {"scenario", scenario_body(file.scenario)},
                   {"config", config_to_json(t.config)},
                   {"seed", t.seed},
                   {"max_iterations", t.max_iterations}};
    out += header.dump();
    out += '\n';
    for (const auto& e : t.events) {
        json ev = {{"type", "event"},
                   {"iteration", e.iteration},
                   {"agent", e.agent},
                   {"attempted", e.attempted},
                   {"move", e.accepted_move ? move_to_json(*e.accepted_move) : json(nullptr)},
                   {"remaining", e.remaining_after},
                   {"potential", e.potential_after},
                   {"potential_change",
                    e.potential_change ? json(to_string(*e.potential_change)) : json(nullptr)}};
        out += ev.dump();
        out += '\n';
    }
    EquilibriumMetrics metrics = equilibrium_metrics(t, file.scenario);
    json footer = {{"type", "footer"},
                   {"converged", t.converged},
                   {"total_iterations", t.total_iterations},
                   {"accepted_updates", t.accepted_updates},
                   {"final_partition", groups_to_json(t.final_partition.canonical())},
                   {"potential", potential_json(t.potential)},
                   {"metrics", metrics_json(metrics)}};
    out += footer.dump();
    out += '\n';
    return out;
}

bool looks_like_trace(std::string_view text) {
    const auto eol = text.find('\n');
    const auto first = text.substr(0, eol);
    try {
        const json j = json::parse(first.begin(), first.end());
        return j.is_object() && j.value("type", "") == "header";
    } catch (const json::exception&) {
        return false;
    }
}

TraceFile trace_from_string(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        const auto end = eol == std::string_view::npos ? text.size() : eol;
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    if (lines.empty()) malformed("trace line 1: empty file");

    auto parse_line = [&](std::size_t i) {
        const std::string where = "trace line " + std::to_string(i + 1);
        json j = parse_json(lines[i], where);
        if (!j.is_object()) malformed(where + ": record is not an object");
        return j;
    };

    TraceFile file;
    SimTrace& t = file.trace;

    const json header = parse_line(0);
    {
        const std::string where = "trace line 1";
        if (string_field(header, "type", where) != "header") {
            malformed(where + ": first record must be the header");
        }
        check_version(header, where);
        file.engine_version = string_field(header, "engine_version", where);
        t.scenario_digest = string_field(header, "scenario_digest", where);
        file.scenario = scenario_from_json(field(header, "scenario", where), where + " scenario");
        t.config = config_from_json(field(header, "config", where), where + " config");
        t.seed = unsigned_field(header, "seed", where);
        t.max_iterations = unsigned_field(header, "max_iterations", where);
    }

    std::optional<json> footer;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = "trace line " + std::to_string(i + 1);
        if (footer) malformed(where + ": record after footer");
        json j = parse_line(i);
        const auto type = string_field(j, "type", where);
        if (type == "footer") {
            footer = std::move(j);
            continue;
        }
        if (type != "event") malformed(where + ": unknown record type '" + type + "'");
        UpdateEvent e;
        e.iteration = unsigned_field(j, "iteration", where);
        e.agent = unsigned_field(j, "agent", where);
        e.attempted = bool_field(j, "attempted", where);
        if (const json& mv = field(j, "move", where); !mv.is_null()) {
            e.accepted_move = move_from_json(mv, where + " move");
        }
        e.remaining_after = unsigned_field(j, "remaining", where);
        const json& pot = field(j, "potential", where);
        if (!pot.is_array()) malformed(where + " field 'potential' must be an array");
        for (const auto& v : pot) {
            if (!v.is_number()) malformed(where + " potential holds a non-number");
            e.potential_after.push_back(v.get<double>());
        }
        if (const json& pc = field(j, "potential_change", where); !pc.is_null()) {
            if (!pc.is_string()) malformed(where + " field 'potential_change' must be a string");
            e.potential_change = change_from_string(pc.get<std::string>(), where);
        }
        if (e.agent >= file.scenario.size()) {
            malformed(where + ": agent " + std::to_string(e.agent) + " is not in the scenario");
        }
        if (!t.events.empty() && e.iteration <= t.events.back().iteration) {
            malformed(where + ": iteration numbers must strictly increase");
        }
        t.events.push_back(std::move(e));
    }
    if (!footer) {
        malformed("trace line " + std::to_string(lines.size()) +
                  ": file ends without a footer record (truncated?)");
    }

    const std::string where = "trace footer";
    t.converged = bool_field(*footer, "converged", where);
    t.total_iterations = unsigned_field(*footer, "total_iterations", where);
    t.accepted_updates = unsigned_field(*footer, "accepted_updates", where);
    t.potential = potential_from_json(field(*footer, "potential", where), where + " potential");
    const Groups final_groups =
        groups_from_json(field(*footer, "final_partition", where), where + " final_partition");

    if (scenario_digest(file.scenario) != t.scenario_digest) {
        throw IntegrityError("trace header digest " + t.scenario_digest +
                             " does not match its embedded scenario");
    }
    std::vector<Partition> frames;
    try {
        frames = replay_partitions(t, file.scenario.size());
    } catch (const ModelError& e) {
        throw IntegrityError(std::string("trace events do not replay: ") + e.what());
    }
    if (frames.back().canonical() != final_groups) {
        throw IntegrityError("replayed events do not reproduce the footer's final partition");
    }
    t.final_partition = std::move(frames.back());
    PotentialStats counted;
    std::uint64_t accepted = 0;
    for (const auto& e : t.events) {
        if (!e.accepted_move) continue;
        ++accepted;
        if (e.potential_change == PotentialChange::Increase) ++counted.increases;
        if (e.potential_change == PotentialChange::Equal) ++counted.equal;
        if (e.potential_change == PotentialChange::Decrease) ++counted.decreases;
    }
    if (accepted != t.accepted_updates || !(counted == t.potential)) {
        throw IntegrityError("footer update counters disagree with the event records");
    }
    if (t.events.size() != t.total_iterations) {
        throw IntegrityError("footer total_iterations disagrees with the number of events");
    }
    return file;
}

void save_trace(const std::filesystem::path& path, const TraceFile& file) {
    write_file(path, trace_to_string(file));
}

TraceFile load_trace(const std::filesystem::path& path) {
    return trace_from_string(read_file(path));
}

// ---------------------------------------------------------------------------
// Reports

std::string metrics_to_json(const EquilibriumMetrics& metrics) {
    return metrics_json(metrics).dump() + "\n";
}

std::string ise_report_to_json(const IseReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"agent", v.agent}, {"move", move_to_json(v.move)}});
    }
    json j = {{"is_ise", report.is_ise}, {"violations", violations}};
    return j.dump() + "\n";
}

namespace {

json series_json(const TrendSeries& s) {
    return {{"label", s.label},
            {"correlation", s.correlation ? json(*s.correlation) : json(nullptr)}};
}

}  // namespace

std::string trend_report_to_json(const TrendReport& report) {
    json rows = json::array();
    for (const auto& s : report.size_vs_resource_range) rows.push_back(series_json(s));
    json cols = json::array();
    for (const auto& s : report.groups_vs_location_range) cols.push_back(series_json(s));
    json j = {{"mean_group_size_vs_r_max", rows},
              {"num_groups_vs_x_max", cols},
              {"sectors_vs_group_size", series_json(report.sectors_vs_size)},
              {"potential_decrease_fraction", report.potential_decrease_fraction}};
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Sweep

std::string sweep_to_csv(const SweepResult& result) {
    std::string out =
        "x_max,r_max,replications,num_groups_mean,num_groups_std,mean_group_size_mean,"
        "mean_group_size_std,mean_sectors_mean,mean_sectors_std,iterations_mean,"
        "iterations_std,iterations_max,converged_within_threshold,failures,"
        "potential_increases,potential_equal,potential_decreases\n";
    for (const auto& c : result.cells) {
        const std::string fields[] = {
            format_double(c.x_max),
            format_double(c.r_max),
            std::to_string(c.replications),
            format_double(c.num_groups.mean),
            format_double(c.num_groups.std),
            format_double(c.mean_group_size.mean),
            format_double(c.mean_group_size.std),
            format_double(c.mean_sectors_per_group.mean),
            format_double(c.mean_sectors_per_group.std),
            format_double(c.iterations.mean),
            format_double(c.iterations.std),
            std::to_string(c.max_iterations_seen),
            std::to_string(c.converged_within_threshold),
            std::to_string(c.failures),
            std::to_string(c.potential.increases),
            std::to_string(c.potential.equal),
            std::to_string(c.potential.decreases),
        };
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) out += ',';
            out += fields[i];
        }
        out += '\n';
    }
    return out;
}

namespace {

json summary_json(const MetricSummary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

MetricSummary summary_from_json(const json& j, const std::string& where) {
    return {number_field(j, "mean", where), number_field(j, "std", where)};
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) malformed(where + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) malformed(where + " holds a non-number");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

std::string sweep_to_json(const SweepResult& result) {
    const SweepParams& p = result.params;
    json params = {{"x_max_list", p.x_max_list},
                   {"r_max_list", p.r_max_list},
                   {"replications", p.replications},
                   {"base_seed", p.base_seed},
                   {"m", p.m},
                   {"config", config_to_json(p.cfg)},
                   {"integer_resources", p.integer_resources},
                   {"max_iterations", p.max_iterations},
                   {"iteration_threshold", p.iteration_threshold}};
    json cells = json::array();
    for (const auto& c : result.cells) {
        cells.push_back({{"x_max", c.x_max},
                         {"r_max", c.r_max},
                         {"replications", c.replications},
                         {"num_groups", summary_json(c.num_groups)},
                         {"mean_group_size", summary_json(c.mean_group_size)},
                         {"mean_sectors_per_group", summary_json(c.mean_sectors_per_group)},
                         {"iterations", summary_json(c.iterations)},
                         {"iterations_max", c.max_iterations_seen},
                         {"converged_within_threshold", c.converged_within_threshold},
                         {"failures", c.failures},
                         {"potential", potential_json(c.potential)}});
    }
    json j = {{"format_version", kFormatVersion},
              {"params", params},
              {"cells", cells},
              {"potential_decrease_fraction", result.potential_decrease_fraction()}};
    return j.dump(2) + "\n";
}

SweepResult sweep_from_json(std::string_view text) {
    const json j = parse_json(text, "sweep");
    check_version(j, "sweep");
    SweepResult r;
    const json& p = field(j, "params", "sweep");
    const std::string pw = "sweep params";
    r.params.x_max_list = number_list(field(p, "x_max_list", pw), pw + " x_max_list");
    r.params.r_max_list = number_list(field(p, "r_max_list", pw), pw + " r_max_list");
    r.params.replications = unsigned_field(p, "replications", pw);
    r.params.base_seed = unsigned_field(p, "base_seed", pw);
    r.params.m = unsigned_field(p, "m", pw);
    r.params.cfg = config_from_json(field(p, "config", pw), pw + " config");
    r.params.integer_resources = bool_field(p, "integer_resources", pw);
    r.params.max_iterations = unsigned_field(p, "max_iterations", pw);
    r.params.iteration_threshold = unsigned_field(p, "iteration_threshold", pw);
    const json& cells = field(j, "cells", "sweep");
    if (!cells.is_array()) malformed("sweep field 'cells' must be an array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string w = "sweep cells[" + std::to_string(i) + "]";
        const json& c = cells[i];
        SweepCell cell;
        cell.x_max = number_field(c, "x_max", w);
        cell.r_max = number_field(c, "r_max", w);
        cell.replications = unsigned_field(c, "replications", w);
        cell.num_groups = summary_from_json(field(c, "num_groups", w), w);
        cell.mean_group_size = summary_from_json(field(c, "mean_group_size", w), w);
        cell.mean_sectors_per_group = summary_from_json(field(c, "mean_sectors_per_group", w), w);
        cell.iterations = summary_from_json(field(c, "iterations", w), w);
        cell.max_iterations_seen = unsigned_field(c, "iterations_max", w);
        cell.converged_within_threshold = unsigned_field(c, "converged_within_threshold", w);
        cell.failures = unsigned_field(c, "failures", w);
        cell.potential = potential_from_json(field(c, "potential", w), w);
        r.cells.push_back(cell);
    }
    if (r.cells.size() != r.params.x_max_list.size() * r.params.r_max_list.size()) {
        malformed("sweep cell count does not match the grid");
    }
    return r;
}

}  // namespace groupform
