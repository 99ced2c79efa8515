#include "groupform/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace groupform {

void GameConfig::validate() const {
    if (k < 2) {
        throw ModelError("category count k must be at least 2, got " + std::to_string(k));
    }
    if (!(distance_decay > 0.0) || !std::isfinite(distance_decay)) {
        throw ModelError("distance decay lambda must be positive and finite");
    }
}

Scenario::Scenario(std::size_t k, std::vector<Agent> agents) : k_(k), agents_(std::move(agents)) {
    if (k_ < 2) {
        throw ModelError("category count k must be at least 2, got " + std::to_string(k_));
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const Agent& a = agents_[i];
        if (a.id != i) {
            throw ModelError("agent ids must be dense from 0; position " + std::to_string(i) +
                             " holds id " + std::to_string(a.id));
        }
        if (a.category.index >= k_) {
            throw ModelError("agent " + std::to_string(i) + " has category " +
                             std::to_string(a.category.index) + " outside [0, " +
                             std::to_string(k_) + ")");
        }
        if (!(a.resource > 0.0) || !std::isfinite(a.resource)) {
            throw ModelError("agent " + std::to_string(i) + " has nonpositive resource");
        }
        if (!std::isfinite(a.position.x) || !std::isfinite(a.position.y)) {
            throw ModelError("agent " + std::to_string(i) + " has a non-finite position");
        }
    }
}

const Agent& Scenario::at(AgentId id) const {
    if (id >= agents_.size()) {
        throw LookupError("unknown agent id " + std::to_string(id));
    }
    return agents_[id];
}

std::vector<double> category_totals(std::span<const AgentId> members, const Scenario& agents,
                                    std::size_t k) {
    std::vector<double> totals(k, 0.0);
    for (AgentId id : members) {
        const Agent& a = agents.at(id);
        if (a.category.index >= k) {
            throw LookupError("agent " + std::to_string(id) + " category exceeds k");
        }
        totals[a.category.index] += a.resource;
    }
    return totals;
}

double boosting_factor(std::span<const double> totals) {
    double sum = 0.0;
    for (double t : totals) {
        if (t < 0.0) {
            throw ModelError("category totals must be nonnegative");
        }
        sum += t;
    }
    if (sum <= 0.0) {
        throw ModelError("boosting factor undefined for an all-zero resource vector");
    }
    // Direct pairwise sum keeps single-category groups at exactly 1.
    double pairs = 0.0;
    for (std::size_t a = 0; a < totals.size(); ++a) {
        if (totals[a] == 0.0) continue;
        for (std::size_t b = a + 1; b < totals.size(); ++b) {
            pairs += totals[a] * totals[b];
        }
    }
    return 1.0 + pairs / sum;
}

double boosted_resource(std::span<const double> totals) {
    const double raw = std::accumulate(totals.begin(), totals.end(), 0.0);
    return raw * boosting_factor(totals);
}

double group_resource(std::span<const AgentId> members, const Scenario& agents, std::size_t k) {
    const auto totals = category_totals(members, agents, k);
    return boosted_resource(totals);
}

double group_distance(std::span<const AgentId> members, const Scenario& agents) {
    double total = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const Point& p = agents.at(members[i]).position;
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const Point& q = agents.at(members[j]).position;
            total += std::hypot(p.x - q.x, p.y - q.y);
        }
    }
    return total;
}

double group_utility(std::span<const AgentId> members, const Scenario& agents,
                     const GameConfig& cfg) {
    return group_resource(members, agents, cfg.k) *
           std::exp(-cfg.distance_decay * group_distance(members, agents));
}

double log_group_utility(std::span<const AgentId> members, const Scenario& agents,
                         const GameConfig& cfg) {
    return std::log(group_resource(members, agents, cfg.k)) -
           cfg.distance_decay * group_distance(members, agents);
}

int compare_utility(double lhs, double rhs) noexcept {
    const double diff = lhs - rhs;
    if (diff > kUtilityTolerance) return 1;
    if (diff < -kUtilityTolerance) return -1;
    return 0;
}

// ---------------------------------------------------------------------------
// Partition

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.slots_.resize(n);
    p.membership_.resize(n);
    for (AgentId a = 0; a < n; ++a) {
        p.slots_[a] = {a};
        p.membership_[a] = a;
    }
    p.live_ = n;
    return p;
}

Partition Partition::from_groups(const std::vector<std::vector<AgentId>>& groups, std::size_t n) {
    constexpr GroupIndex unset = static_cast<GroupIndex>(-1);
    Partition p;
    p.membership_.assign(n, unset);
    for (const auto& g : groups) {
        if (g.empty()) {
            throw ModelError("partition contains an empty group");
        }
        const GroupIndex idx = p.slots_.size();
        std::vector<AgentId> members = g;
        std::sort(members.begin(), members.end());
        for (AgentId a : members) {
            if (a >= n) {
                throw LookupError("partition references unknown agent id " + std::to_string(a));
            }
            if (p.membership_[a] != unset) {
                throw ModelError("agent " + std::to_string(a) + " appears in more than one group");
            }
            p.membership_[a] = idx;
        }
        p.slots_.push_back(std::move(members));
    }
    for (AgentId a = 0; a < n; ++a) {
        if (p.membership_[a] == unset) {
            throw ModelError("agent " + std::to_string(a) + " is not covered by the partition");
        }
    }
    p.live_ = p.slots_.size();
    return p;
}

void Partition::detach(AgentId a) {
    auto& old = slots_.at(membership_.at(a));
    old.erase(std::find(old.begin(), old.end(), a));
    if (old.empty()) --live_;
}

void Partition::move_to(AgentId a, GroupIndex target) {
    if (target >= slots_.size() || slots_[target].empty()) {
        throw ModelError("move target " + std::to_string(target) + " is not a live group");
    }
    if (membership_.at(a) == target) {
        throw ModelError("agent " + std::to_string(a) + " is already in group " +
                         std::to_string(target));
    }
    detach(a);
    auto& members = slots_[target];
    members.insert(std::upper_bound(members.begin(), members.end(), a), a);
    membership_[a] = target;
}

GroupIndex Partition::move_to_new(AgentId a) {
    detach(a);
    slots_.push_back({a});
    membership_[a] = slots_.size() - 1;
    ++live_;
    return slots_.size() - 1;
}

std::vector<std::vector<AgentId>> Partition::canonical() const {
    std::vector<std::vector<AgentId>> out;
    out.reserve(live_);
    for (const auto& s : slots_) {
        if (!s.empty()) out.push_back(s);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& l, const auto& r) { return l.front() < r.front(); });
    return out;
}

void Partition::validate() const {
    std::vector<int> seen(membership_.size(), 0);
    std::size_t live = 0;
    for (GroupIndex g = 0; g < slots_.size(); ++g) {
        const auto& s = slots_[g];
        if (s.empty()) continue;
        ++live;
        if (!std::is_sorted(s.begin(), s.end())) {
            throw ModelError("group " + std::to_string(g) + " members are not sorted");
        }
        for (AgentId a : s) {
            if (a >= membership_.size()) {
                throw ModelError("group " + std::to_string(g) + " holds unknown agent");
            }
            if (seen[a]++) {
                throw ModelError("agent " + std::to_string(a) + " appears twice");
            }
            if (membership_[a] != g) {
                throw ModelError("membership of agent " + std::to_string(a) + " is inconsistent");
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw ModelError("partition does not cover every agent");
    }
    if (live != live_) {
        throw ModelError("live group count is stale");
    }
}

}  // namespace groupform
