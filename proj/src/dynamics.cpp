#include "groupform/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace groupform {

const char* to_string(MoveKind kind) noexcept {
    switch (kind) {
        case MoveKind::Join: return "join";
        case MoveKind::FormSingleton: return "singleton";
        case MoveKind::Stay: return "stay";
    }
    return "?";
}

const char* to_string(PotentialChange change) noexcept {
    switch (change) {
        case PotentialChange::Increase: return "increase";
        case PotentialChange::Equal: return "equal";
        case PotentialChange::Decrease: return "decrease";
    }
    return "?";
}

std::vector<MoveOption> enumerate_options(AgentId agent, const Partition& partition,
                                          const Scenario& agents, const GameConfig& cfg) {
    const GroupIndex own = partition.group_of(agent);
    const auto& own_members = partition.members(own);
    const double current = log_group_utility(own_members, agents, cfg);

    std::vector<MoveOption> options;
    options.reserve(partition.group_count() + 1);

    std::vector<AgentId> joined;
    for (GroupIndex g = 0; g < partition.slot_count(); ++g) {
        if (g == own || !partition.is_live(g)) continue;
        const auto& members = partition.members(g);
        joined.assign(members.begin(), members.end());
        joined.push_back(agent);
        const double after = log_group_utility(joined, agents, cfg);
        MoveOption opt;
        opt.kind = MoveKind::Join;
        opt.target = g;
        opt.mover_new_log_utility = after;
        opt.target_old_log_utility = log_group_utility(members, agents, cfg);
        opt.target_new_log_utility = after;
        options.push_back(opt);
    }

    if (own_members.size() >= 2) {
        MoveOption opt;
        opt.kind = MoveKind::FormSingleton;
        opt.mover_new_log_utility = std::log(agents.at(agent).resource);
        options.push_back(opt);
    }

    MoveOption stay;
    stay.kind = MoveKind::Stay;
    stay.target = own;
    stay.mover_new_log_utility = current;
    options.push_back(stay);
    return options;
}

bool admissible(const MoveOption& move, double current_log_utility) noexcept {
    switch (move.kind) {
        case MoveKind::Join:
            return compare_utility(move.mover_new_log_utility, current_log_utility) > 0 &&
                   move.target_old_log_utility && move.target_new_log_utility &&
                   compare_utility(*move.target_new_log_utility, *move.target_old_log_utility) >= 0;
        case MoveKind::FormSingleton:
            return compare_utility(move.mover_new_log_utility, current_log_utility) > 0;
        case MoveKind::Stay:
            return false;
    }
    return false;
}

std::optional<MoveOption> best_admissible(const std::vector<MoveOption>& options,
                                          double current_log_utility) {
    std::optional<double> best_value;
    for (const auto& opt : options) {
        if (!admissible(opt, current_log_utility)) continue;
        if (!best_value || opt.mover_new_log_utility > *best_value) {
            best_value = opt.mover_new_log_utility;
        }
    }
    if (!best_value) return std::nullopt;

    const MoveOption* join = nullptr;
    const MoveOption* single = nullptr;
    for (const auto& opt : options) {
        if (!admissible(opt, current_log_utility)) continue;
        if (compare_utility(opt.mover_new_log_utility, *best_value) < 0) continue;
        if (opt.kind == MoveKind::Join) {
            if (!join || opt.target < join->target) join = &opt;
        } else if (opt.kind == MoveKind::FormSingleton) {
            single = &opt;
        }
    }
    return join ? *join : *single;
}

std::vector<double> potential_vector(const Partition& partition, const Scenario& agents,
                                     const GameConfig& cfg) {
    std::vector<double> out;
    out.reserve(partition.agent_count());
    for (GroupIndex g = 0; g < partition.slot_count(); ++g) {
        const auto& members = partition.members(g);
        if (members.empty()) continue;
        const double u = log_group_utility(members, agents, cfg);
        out.insert(out.end(), members.size(), u);
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

PotentialChange compare_potential(const std::vector<double>& before,
                                  const std::vector<double>& after) {
    const std::size_t n = std::min(before.size(), after.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int c = compare_utility(after[i], before[i]);
        if (c > 0) return PotentialChange::Increase;
        if (c < 0) return PotentialChange::Decrease;
    }
    return PotentialChange::Equal;
}

// ---------------------------------------------------------------------------

Dynamics::Dynamics(const Scenario& agents, const GameConfig& cfg, Partition start)
    : agents_(&agents), cfg_(cfg), partition_(std::move(start)) {
    cfg_.validate();
    if (cfg_.k != agents.k()) {
        throw ModelError("config k = " + std::to_string(cfg_.k) + " does not match scenario k = " +
                         std::to_string(agents.k()));
    }
    if (partition_.agent_count() != agents.size()) {
        throw ModelError("start partition does not cover the scenario's agents");
    }
    partition_.validate();
    reset_remaining();
    last_potential_ = potential_vector(partition_, agents, cfg_);
}

Dynamics::Dynamics(const Scenario& agents, const GameConfig& cfg)
    : Dynamics(agents, cfg, Partition::singletons(agents.size())) {}

void Dynamics::reset_remaining() {
    remaining_.resize(agents_->size());
    std::iota(remaining_.begin(), remaining_.end(), AgentId{0});
}

UpdateEvent Dynamics::step(Rng& rng) {
    if (remaining_.empty()) {
        throw StateError("step called with an empty remaining set");
    }
    const auto pick = static_cast<std::size_t>(rng.uniform_index(remaining_.size()));
    const AgentId agent = remaining_[pick];

    const auto options = enumerate_options(agent, partition_, *agents_, cfg_);
    const double current = options.back().mover_new_log_utility;
    const auto best = best_admissible(options, current);

    UpdateEvent event;
    event.iteration = ++iteration_;
    event.agent = agent;
    event.attempted = true;

    if (!best) {
        remaining_.erase(remaining_.begin() + static_cast<std::ptrdiff_t>(pick));
        event.remaining_after = remaining_.size();
        event.potential_after = last_potential_;
        return event;
    }

    MoveOption applied = *best;
    if (applied.kind == MoveKind::Join) {
        partition_.move_to(agent, applied.target);
    } else {
        applied.target = partition_.move_to_new(agent);
    }
#ifndef NDEBUG
    partition_.validate();
#endif
    reset_remaining();

    auto potential = potential_vector(partition_, *agents_, cfg_);
    const auto change = compare_potential(last_potential_, potential);
    switch (change) {
        case PotentialChange::Increase: ++stats_.increases; break;
        case PotentialChange::Equal: ++stats_.equal; break;
        case PotentialChange::Decrease: ++stats_.decreases; break;
    }
    last_potential_ = potential;

    event.accepted_move = applied;
    event.remaining_after = remaining_.size();
    event.potential_after = std::move(potential);
    event.potential_change = change;
    return event;
}

SimTrace run_to_convergence(const Scenario& agents, const GameConfig& cfg, std::uint64_t seed,
                            std::uint64_t max_iterations, RunOptions options) {
    if (max_iterations < 1) {
        throw ModelError("max_iterations must be at least 1");
    }
    Dynamics dyn(agents, cfg);
    Rng rng(seed);

    SimTrace trace;
    trace.config = cfg;
    trace.seed = seed;
    trace.max_iterations = max_iterations;
    while (!dyn.converged() && dyn.iterations() < max_iterations) {
        auto event = dyn.step(rng);
        if (event.accepted_move) ++trace.accepted_updates;
        if (options.record_events) trace.events.push_back(std::move(event));
    }
    trace.final_partition = dyn.partition();
    trace.converged = dyn.converged();
    trace.total_iterations = dyn.iterations();
    trace.potential = dyn.potential_stats();
    return trace;
}

std::vector<Partition> replay_partitions(const SimTrace& trace, std::size_t agent_count) {
    std::vector<Partition> frames;
    frames.reserve(trace.events.size() + 1);
    Partition p = Partition::singletons(agent_count);
    frames.push_back(p);
    for (const auto& e : trace.events) {
        if (e.accepted_move) {
            const MoveOption& m = *e.accepted_move;
            if (m.kind == MoveKind::Join) {
                p.move_to(e.agent, m.target);
            } else if (m.kind == MoveKind::FormSingleton) {
                const GroupIndex created = p.move_to_new(e.agent);
                if (created != m.target) {
                    throw ModelError("replayed singleton slot " + std::to_string(created) +
                                     " differs from recorded slot " + std::to_string(m.target) +
                                     " at iteration " + std::to_string(e.iteration));
                }
            } else {
                throw ModelError("trace records a Stay move as accepted at iteration " +
                                 std::to_string(e.iteration));
            }
        }
        frames.push_back(p);
    }
    return frames;
}

}  // namespace groupform
