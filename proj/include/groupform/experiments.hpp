#pragma once

// Random scenario generation, equilibrium metrics and the (x_max, r_max)
// parameter sweep with rank-correlation trend checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "groupform/dynamics.hpp"
#include "groupform/model.hpp"

namespace groupform {

class ParameterError : public ModelError {
public:
    using ModelError::ModelError;
};

struct ScenarioParams {
    std::size_t m = 5;
    std::size_t k = 3;
    double x_max = 10.0;
    double y_max = 10.0;
    double r_max = 20.0;
    std::uint64_t seed = 0;
    /// Draw resources from {1, ..., floor(r_max)} instead of [1, r_max].
    bool integer_resources = false;

    void validate() const;
};

/// m agents per category with ids grouped by category (ids [c*m, (c+1)*m)
/// belong to category c). For each agent in id order the draws are x, y,
/// resource.
Scenario generate_scenario(const ScenarioParams& params);

struct EquilibriumMetrics {
    std::size_t num_groups = 0;
    double mean_group_size = 0.0;
    double mean_sectors_per_group = 0.0;
    std::uint64_t iterations = 0;
    bool converged = false;

    friend bool operator==(const EquilibriumMetrics&, const EquilibriumMetrics&) = default;
};

EquilibriumMetrics equilibrium_metrics(const Partition& partition, const Scenario& agents);
EquilibriumMetrics equilibrium_metrics(const SimTrace& trace, const Scenario& agents);

/// Default attempt budget for a run over n agents: 10 n (n + 1).
std::uint64_t default_max_iterations(std::size_t n) noexcept;

/// Seed for replication `rep` of grid cell (xi, ri).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t xi, std::size_t ri, std::size_t rep);

struct MetricSummary {
    double mean = 0.0;
    /// Sample standard deviation (n - 1); zero for a single replication.
    double std = 0.0;
    friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct SweepCell {
    double x_max = 0.0;
    double r_max = 0.0;
    std::size_t replications = 0;
    MetricSummary num_groups;
    MetricSummary mean_group_size;
    MetricSummary mean_sectors_per_group;
    MetricSummary iterations;
    std::uint64_t max_iterations_seen = 0;
    /// Runs that converged within the given attempt threshold.
    std::size_t converged_within_threshold = 0;
    std::size_t failures = 0;
    PotentialStats potential;

    friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepParams {
    std::vector<double> x_max_list{1, 10, 20, 40, 60, 80, 100};
    std::vector<double> r_max_list{1, 20, 40, 60, 80, 100};
    std::size_t replications = 200;
    std::uint64_t base_seed = 0;
    std::size_t m = 5;
    GameConfig cfg;
    bool integer_resources = false;
    /// Zero selects default_max_iterations(m * k).
    std::uint64_t max_iterations = 0;
    /// Attempt count reported through SweepCell::converged_within_threshold.
    std::uint64_t iteration_threshold = 200;
    /// Worker threads; zero picks the hardware concurrency.
    std::size_t threads = 1;

    void validate() const;
};

struct SweepResult {
    SweepParams params;
    /// Row-major: cells[xi * r_max_list.size() + ri].
    std::vector<SweepCell> cells;

    const SweepCell& cell(std::size_t xi, std::size_t ri) const;
    PotentialStats potential_totals() const;
    /// Fraction of accepted updates whose potential decreased lexicographically.
    double potential_decrease_fraction() const;
};

/// Per-replication hook used by acceptance tooling to inspect every run.
struct RunRecord {
    std::size_t xi = 0;
    std::size_t ri = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    Scenario scenario;
    SimTrace trace;
};

SweepResult run_sweep(const SweepParams& params);
/// Same as run_sweep; `inspect` is called from worker threads, one call per
/// replication, in no particular order.
SweepResult run_sweep(const SweepParams& params,
                      const std::function<void(const RunRecord&)>& inspect);

/// Spearman rank correlation with average ranks for ties. Empty when either
/// series is constant or shorter than two.
std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b);

struct TrendSeries {
    std::string label;
    std::optional<double> correlation;
};

struct TrendReport {
    /// Per x_max row: mean_group_size against r_max.
    std::vector<TrendSeries> size_vs_resource_range;
    /// Per r_max column: num_groups against x_max.
    std::vector<TrendSeries> groups_vs_location_range;
    /// All cells: mean_sectors_per_group against mean_group_size.
    TrendSeries sectors_vs_size;
    double potential_decrease_fraction = 0.0;
};

/// Series with fewer than two points (single-row or single-column grids)
/// report an undefined correlation.
TrendReport trend_checks(const SweepResult& result);

}  // namespace groupform
