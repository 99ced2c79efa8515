#pragma once

// Asynchronous improvement dynamics.
//
// Start from all singletons with every agent in the "remaining" set. Each
// iteration draws one agent uniformly from the remaining set. The agent may
// join another group (if that strictly improves its utility and does not
// lower the receiving group's utility) or split off into a singleton (if
// that strictly improves its utility). If neither helps, the agent leaves the
// remaining set; otherwise the best move is applied and the remaining set is
// refilled with all agents. An empty remaining set means the partition is an
// individually stable equilibrium.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groupform/model.hpp"
#include "groupform/rng.hpp"

namespace groupform {

enum class MoveKind { Join, FormSingleton, Stay };

const char* to_string(MoveKind kind) noexcept;

struct MoveOption {
    MoveKind kind = MoveKind::Stay;
    /// Receiving group for Join. On an accepted FormSingleton, the newly
    /// appended slot; for Stay, the agent's current group.
    GroupIndex target = 0;
    double mover_new_log_utility = 0.0;
    std::optional<double> target_old_log_utility;
    std::optional<double> target_new_log_utility;

    friend bool operator==(const MoveOption&, const MoveOption&) = default;
};

/// Outcome of comparing consecutive potential vectors lexicographically.
enum class PotentialChange { Increase, Equal, Decrease };

const char* to_string(PotentialChange change) noexcept;

struct UpdateEvent {
    std::uint64_t iteration = 0;
    AgentId agent = 0;
    bool attempted = true;
    std::optional<MoveOption> accepted_move;
    std::size_t remaining_after = 0;
    /// Descending log utilities after this event.
    std::vector<double> potential_after;
    /// Set on accepted updates: comparison against the previous accepted
    /// update's potential (or the initial one).
    std::optional<PotentialChange> potential_change;

    friend bool operator==(const UpdateEvent&, const UpdateEvent&) = default;
};

struct PotentialStats {
    std::uint64_t increases = 0;
    std::uint64_t equal = 0;
    std::uint64_t decreases = 0;

    std::uint64_t total() const noexcept { return increases + equal + decreases; }
    friend bool operator==(const PotentialStats&, const PotentialStats&) = default;
};

struct SimTrace {
    std::string scenario_digest;
    GameConfig config;
    std::uint64_t seed = 0;
    std::uint64_t max_iterations = 0;
    std::vector<UpdateEvent> events;
    Partition final_partition;
    bool converged = false;
    std::uint64_t total_iterations = 0;
    std::uint64_t accepted_updates = 0;
    PotentialStats potential;

    friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

/// Every Join (one per other live group), FormSingleton when the agent's group
/// has at least two members, and Stay, in that order. Joins are listed by
/// ascending group index.
std::vector<MoveOption> enumerate_options(AgentId agent, const Partition& partition,
                                          const Scenario& agents, const GameConfig& cfg);

bool admissible(const MoveOption& move, double current_log_utility) noexcept;

/// Highest mover utility among admissible options; ties (within tolerance)
/// go to the lowest-index Join, and FormSingleton only wins outright.
std::optional<MoveOption> best_admissible(const std::vector<MoveOption>& options,
                                          double current_log_utility);

std::vector<double> potential_vector(const Partition& partition, const Scenario& agents,
                                     const GameConfig& cfg);

/// Lexicographic comparison of two descending potential vectors with
/// per-entry tolerance.
PotentialChange compare_potential(const std::vector<double>& before,
                                  const std::vector<double>& after);

class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Mutable state of one run.
class Dynamics {
public:
    Dynamics(const Scenario& agents, const GameConfig& cfg, Partition start);
    Dynamics(const Scenario& agents, const GameConfig& cfg);

    /// Performs one attempted update. Throws StateError when the remaining set
    /// is empty.
    UpdateEvent step(Rng& rng);

    bool converged() const noexcept { return remaining_.empty(); }
    const Partition& partition() const noexcept { return partition_; }
    const std::vector<AgentId>& remaining() const noexcept { return remaining_; }
    std::uint64_t iterations() const noexcept { return iteration_; }
    const PotentialStats& potential_stats() const noexcept { return stats_; }

private:
    void reset_remaining();

    const Scenario* agents_;
    GameConfig cfg_;
    Partition partition_;
    std::vector<AgentId> remaining_;
    std::vector<double> last_potential_;
    std::uint64_t iteration_ = 0;
    PotentialStats stats_;
};

struct RunOptions {
    /// Keep per-event records in the trace; sweeps turn this off.
    bool record_events = true;
};

/// Steps until convergence or until max_iterations attempts have been made.
/// Non-convergence is reported through SimTrace::converged.
SimTrace run_to_convergence(const Scenario& agents, const GameConfig& cfg, std::uint64_t seed,
                            std::uint64_t max_iterations, RunOptions options = {});

/// Re-applies the accepted moves of a trace to the all-singleton start and
/// returns the partition after each event (index 0 is the start).
std::vector<Partition> replay_partitions(const SimTrace& trace, std::size_t agent_count);

}  // namespace groupform
