#pragma once

// File formats.
//
//   scenario   JSON object  {format_version, k, agents[{id, category, resource, x, y}],
//                            provenance?}
//   partition  JSON object  {format_version, groups[[id, ...], ...]}
//   trace      JSONL        header line, one event line per attempted step, footer line
//   sweep      CSV (one row per grid cell) and a JSON document with the same data
//
// Object keys are written in sorted order and floating-point values use the
// shortest decimal that round-trips, so equal inputs give byte-equal files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "groupform/dynamics.hpp"
#include "groupform/experiments.hpp"
#include "groupform/model.hpp"
#include "groupform/oracle.hpp"

namespace groupform {

inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kEngineVersion = "groupform 1.0.0";

enum class ValidationCode {
    Malformed,
    UnsupportedVersion,
    EmptyAgentList,
    DuplicateId,
    NonDenseIds,
    NonpositiveResource,
    CategoryOutOfRange,
    InvalidCategoryCount,
    InvalidPartition,
    ConfigMismatch,
};

const char* to_string(ValidationCode code) noexcept;

/// Input content violates a format or model invariant.
class ValidationError : public std::runtime_error {
public:
    ValidationError(ValidationCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ValidationCode code() const noexcept { return code_; }

private:
    ValidationCode code_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A trace does not match the scenario it claims to come from, or its events
/// do not reproduce its recorded final state.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Provenance {
    ScenarioParams params;
    friend bool operator==(const Provenance& l, const Provenance& r) {
        return l.params.m == r.params.m && l.params.k == r.params.k &&
               l.params.x_max == r.params.x_max && l.params.y_max == r.params.y_max &&
               l.params.r_max == r.params.r_max && l.params.seed == r.params.seed &&
               l.params.integer_resources == r.params.integer_resources;
    }
};

struct ScenarioFile {
    Scenario scenario;
    std::optional<Provenance> provenance;
    friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Content hash over k and the agent table ("fnv1a64:<16 hex digits>").
/// Provenance and key order do not affect it.
std::string scenario_digest(const Scenario& scenario);

std::string scenario_to_string(const ScenarioFile& file);
ScenarioFile scenario_from_string(std::string_view text);
void save_scenario(const std::filesystem::path& path, const ScenarioFile& file);
ScenarioFile load_scenario(const std::filesystem::path& path);

std::string partition_to_string(const Groups& groups);
/// Checks the partition against an agent count; throws ValidationError
/// (InvalidPartition) on unknown ids, overlaps or gaps.
Partition partition_from_string(std::string_view text, std::size_t agent_count);
void save_partition(const std::filesystem::path& path, const Groups& groups);
Partition load_partition(const std::filesystem::path& path, std::size_t agent_count);

struct TraceFile {
    std::string engine_version{kEngineVersion};
    Scenario scenario;
    SimTrace trace;
    friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

/// Fills in the digest from the scenario.
TraceFile make_trace_file(const Scenario& scenario, SimTrace trace);

std::string trace_to_string(const TraceFile& file);
/// Parse errors name the offending line. Digest and replay mismatches raise
/// IntegrityError.
TraceFile trace_from_string(std::string_view text);
void save_trace(const std::filesystem::path& path, const TraceFile& file);
TraceFile load_trace(const std::filesystem::path& path);

/// True if the text starts with a trace header record.
bool looks_like_trace(std::string_view text);

std::string metrics_to_json(const EquilibriumMetrics& metrics);
std::string ise_report_to_json(const IseReport& report);
std::string trend_report_to_json(const TrendReport& report);

std::string sweep_to_csv(const SweepResult& result);
std::string sweep_to_json(const SweepResult& result);
SweepResult sweep_from_json(std::string_view text);

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace groupform
