#include "groupform/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace groupform {

IseReport verify_ise(const Groups& groups, const Scenario& agents, const GameConfig& cfg) {
    std::vector<double> utility(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        utility[g] = log_group_utility(groups[g], agents, cfg);
    }

    IseReport report;
    std::vector<AgentId> joined;
    for (std::size_t home = 0; home < groups.size(); ++home) {
        for (AgentId agent : groups[home]) {
            const double current = utility[home];
            for (std::size_t other = 0; other < groups.size(); ++other) {
                if (other == home) continue;
                joined = groups[other];
                joined.push_back(agent);
                const double after = log_group_utility(joined, agents, cfg);
                const bool mover_gains = after - current > kUtilityTolerance;
                const bool group_accepts = after - utility[other] >= -kUtilityTolerance;
                if (mover_gains && group_accepts) {
                    MoveOption m;
                    m.kind = MoveKind::Join;
                    m.target = other;
                    m.mover_new_log_utility = after;
                    m.target_old_log_utility = utility[other];
                    m.target_new_log_utility = after;
                    report.violations.push_back({agent, m});
                }
            }
            if (groups[home].size() > 1) {
                const AgentId alone[] = {agent};
                const double solo = log_group_utility(alone, agents, cfg);
                if (solo - current > kUtilityTolerance) {
                    MoveOption m;
                    m.kind = MoveKind::FormSingleton;
                    m.target = home;
                    m.mover_new_log_utility = solo;
                    report.violations.push_back({agent, m});
                }
            }
        }
    }
    report.is_ise = report.violations.empty();
    return report;
}

IseReport verify_ise(const Partition& partition, const Scenario& agents, const GameConfig& cfg) {
    if (partition.agent_count() != agents.size()) {
        throw ModelError("partition covers " + std::to_string(partition.agent_count()) +
                         " agents but the scenario has " + std::to_string(agents.size()));
    }
    return verify_ise(partition.canonical(), agents, cfg);
}

void for_each_restricted_growth_string(
    std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit) {
    if (n == 0) {
        visit({});
        return;
    }
    std::vector<std::size_t> rgs(n, 0);
    // prefix_max[i] = max(rgs[0..i]).
    std::vector<std::size_t> prefix_max(n, 0);
    while (true) {
        visit(rgs);
        // Rightmost position that can still be incremented.
        std::size_t i = n - 1;
        while (i > 0 && rgs[i] > prefix_max[i - 1]) {
            --i;
        }
        if (i == 0) return;
        ++rgs[i];
        prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

Groups groups_from_rgs(const std::vector<std::size_t>& rgs) {
    Groups groups;
    for (std::size_t a = 0; a < rgs.size(); ++a) {
        if (rgs[a] == groups.size()) groups.emplace_back();
        groups[rgs[a]].push_back(a);
    }
    return groups;
}

std::vector<Groups> enumerate_all_ise(const Scenario& agents, const GameConfig& cfg) {
    const std::size_t n = agents.size();
    if (n > kMaxEnumerationAgents) {
        throw SizeError("exhaustive enumeration is limited to " +
                        std::to_string(kMaxEnumerationAgents) + " agents, got " +
                        std::to_string(n));
    }
    if (n == 0) return {Groups{}};

    // Log utility of every nonempty subset, indexed by bitmask.
    const std::size_t subsets = std::size_t{1} << n;
    std::vector<double> subset_utility(subsets, 0.0);
    std::vector<AgentId> members;
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        members.clear();
        for (AgentId a = 0; a < n; ++a) {
            if (mask & (std::size_t{1} << a)) members.push_back(a);
        }
        subset_utility[mask] = log_group_utility(members, agents, cfg);
    }

    std::vector<Groups> result;
    std::vector<std::size_t> masks;
    for_each_restricted_growth_string(n, [&](const std::vector<std::size_t>& rgs) {
        masks.clear();
        for (AgentId a = 0; a < n; ++a) {
            if (rgs[a] == masks.size()) masks.push_back(0);
            masks[rgs[a]] |= std::size_t{1} << a;
        }
        for (AgentId a = 0; a < n; ++a) {
            const std::size_t bit = std::size_t{1} << a;
            const std::size_t home = masks[rgs[a]];
            const double current = subset_utility[home];
            if (home != bit && subset_utility[bit] - current > kUtilityTolerance) return;
            for (std::size_t other : masks) {
                if (other == home) continue;
                const double after = subset_utility[other | bit];
                if (after - current > kUtilityTolerance &&
                    after - subset_utility[other] >= -kUtilityTolerance) {
                    return;
                }
            }
        }
        result.push_back(groups_from_rgs(rgs));
    });
    return result;
}

}  // namespace groupform
