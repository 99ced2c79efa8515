#pragma once

// Brute-force ground truth for small instances.
//
// Nothing here calls into the dynamics engine's option enumeration; the ISE
// condition is re-derived from the group formulas alone so the two code paths
// can catch each other's mistakes.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "groupform/dynamics.hpp"
#include "groupform/model.hpp"

namespace groupform {

/// Canonical partition: groups with ascending members, ordered by smallest
/// member. Group indices in violations refer to positions in this list.
using Groups = std::vector<std::vector<AgentId>>;

struct IseViolation {
    AgentId agent = 0;
    MoveOption move;
    friend bool operator==(const IseViolation&, const IseViolation&) = default;
};

struct IseReport {
    bool is_ise = true;
    std::vector<IseViolation> violations;
};

IseReport verify_ise(const Groups& groups, const Scenario& agents, const GameConfig& cfg);
IseReport verify_ise(const Partition& partition, const Scenario& agents, const GameConfig& cfg);

class SizeError : public ModelError {
public:
    using ModelError::ModelError;
};

inline constexpr std::size_t kMaxEnumerationAgents = 12;

/// Calls visit(rgs) for every restricted growth string of length n in
/// lexicographic order: rgs[0] = 0 and rgs[i] <= 1 + max(rgs[0..i)).
void for_each_restricted_growth_string(
    std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit);

/// Groups encoded by a restricted growth string, in canonical order.
Groups groups_from_rgs(const std::vector<std::size_t>& rgs);

/// Every ISE partition, in restricted-growth-string order. Throws SizeError
/// above kMaxEnumerationAgents.
std::vector<Groups> enumerate_all_ise(const Scenario& agents, const GameConfig& cfg);

}  // namespace groupform
