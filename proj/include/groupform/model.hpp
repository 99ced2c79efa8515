#pragma once

// Domain types and closed-form group evaluation for the heterogeneous spatial
// group-formation game.
//
// Each agent holds a positive resource in exactly one category and sits at a
// point in the plane. A group's utility is shared by all of its members:
//
//   U_G = R_G * exp(-lambda * D_G)
//   R_G = (sum_c T_c) * h(T),   h(T) = 1 + (sum_{a<b} T_a T_b) / (sum_c T_c)
//   D_G = sum over unordered member pairs of Euclidean distance
//
// where T is the vector of per-category resource totals of the group.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace groupform {

using AgentId = std::size_t;
using GroupIndex = std::size_t;

/// Absolute tolerance under which two log utilities count as equal.
inline constexpr double kUtilityTolerance = 1e-9;

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by lookups of agent ids that are not in the table.
class LookupError : public ModelError {
public:
    using ModelError::ModelError;
};

struct Category {
    std::size_t index = 0;
    friend bool operator==(Category, Category) = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Agent {
    AgentId id = 0;
    Category category;
    double resource = 1.0;
    Point position;
    friend bool operator==(const Agent&, const Agent&) = default;
};

struct GameConfig {
    std::size_t k = 3;
    double distance_decay = 1.0;

    void validate() const;
    friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

/// Agent table with dense ids 0..n-1 (agent i is stored at index i).
class Scenario {
public:
    Scenario() = default;
    /// Throws ModelError if ids are not dense, categories fall outside
    /// [0, k) or a resource is not positive.
    Scenario(std::size_t k, std::vector<Agent> agents);

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return agents_.size(); }
    std::span<const Agent> agents() const noexcept { return agents_; }
    const Agent& at(AgentId id) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;

private:
    std::size_t k_ = 3;
    std::vector<Agent> agents_;
};

std::vector<double> category_totals(std::span<const AgentId> members,
                                    const Scenario& agents, std::size_t k);

/// Throws ModelError if every entry is zero (or any is negative).
double boosting_factor(std::span<const double> totals);

/// Raw total times boosting factor.
double boosted_resource(std::span<const double> totals);

double group_resource(std::span<const AgentId> members, const Scenario& agents,
                      std::size_t k);

double group_distance(std::span<const AgentId> members, const Scenario& agents);

double group_utility(std::span<const AgentId> members, const Scenario& agents,
                     const GameConfig& cfg);

/// ln(R_G) - lambda * D_G. Every comparison between utilities goes through
/// this form so that large spatial spreads never underflow to ties at zero.
double log_group_utility(std::span<const AgentId> members,
                         const Scenario& agents, const GameConfig& cfg);

/// Three-way comparison of log utilities under kUtilityTolerance.
/// Returns -1, 0 or +1.
int compare_utility(double lhs, double rhs) noexcept;

/// Disjoint cover of the agent set. Group slots are stable handles: a slot
/// emptied by a departure is tombstoned and never reused, and new singleton
/// groups are appended.
class Partition {
public:
    Partition() = default;

    static Partition singletons(std::size_t n);
    /// Builds a partition from explicit groups. Throws ModelError on empty
    /// groups, duplicate or unknown ids, or an incomplete cover.
    static Partition from_groups(const std::vector<std::vector<AgentId>>& groups,
                                 std::size_t n);

    std::size_t agent_count() const noexcept { return membership_.size(); }
    std::size_t slot_count() const noexcept { return slots_.size(); }
    std::size_t group_count() const noexcept { return live_; }

    bool is_live(GroupIndex g) const { return !slots_.at(g).empty(); }
    /// Members of slot g in ascending id order (empty for a tombstone).
    const std::vector<AgentId>& members(GroupIndex g) const { return slots_.at(g); }
    GroupIndex group_of(AgentId a) const { return membership_.at(a); }

    /// Moves an agent into an existing live group.
    void move_to(AgentId a, GroupIndex target);
    /// Moves an agent into a freshly appended singleton slot and returns it.
    GroupIndex move_to_new(AgentId a);

    /// Live groups, members ascending, groups ordered by smallest member.
    std::vector<std::vector<AgentId>> canonical() const;

    /// Checks disjointness, cover and membership consistency.
    void validate() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    void detach(AgentId a);

    std::vector<std::vector<AgentId>> slots_;
    std::vector<GroupIndex> membership_;
    std::size_t live_ = 0;
};

}  // namespace groupform
