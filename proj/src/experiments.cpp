#include "groupform/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "groupform/rng.hpp"

namespace groupform {

void ScenarioParams::validate() const {
    if (m < 1) throw ParameterError("m must be at least 1");
    if (k < 2) throw ParameterError("k must be at least 2");
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ParameterError("x_max must be positive");
    if (!(y_max > 0.0) || !std::isfinite(y_max)) throw ParameterError("y_max must be positive");
    if (!(r_max >= 1.0) || !std::isfinite(r_max)) {
        throw ParameterError("r_max must be at least 1");
    }
}

Scenario generate_scenario(const ScenarioParams& params) {
    params.validate();
    Rng rng(params.seed);
    const auto int_levels = static_cast<std::uint64_t>(std::floor(params.r_max));
    std::vector<Agent> agents;
    agents.reserve(params.m * params.k);
    for (std::size_t c = 0; c < params.k; ++c) {
        for (std::size_t j = 0; j < params.m; ++j) {
            Agent a;
            a.id = agents.size();
            a.category = Category{c};
            a.position.x = rng.uniform(0.0, params.x_max);
            a.position.y = rng.uniform(0.0, params.y_max);
            a.resource = params.integer_resources
                             ? 1.0 + static_cast<double>(rng.uniform_index(int_levels))
                             : rng.uniform(1.0, params.r_max);
            agents.push_back(a);
        }
    }
    return Scenario(params.k, std::move(agents));
}

EquilibriumMetrics equilibrium_metrics(const Partition& partition, const Scenario& agents) {
    EquilibriumMetrics m;
    const auto groups = partition.canonical();
    m.num_groups = groups.size();
    if (groups.empty()) return m;
    m.mean_group_size = static_cast<double>(partition.agent_count()) /
                        static_cast<double>(m.num_groups);
    double sectors = 0.0;
    std::set<std::size_t> seen;
    for (const auto& g : groups) {
        seen.clear();
        for (AgentId a : g) seen.insert(agents.at(a).category.index);
        sectors += static_cast<double>(seen.size());
    }
    m.mean_sectors_per_group = sectors / static_cast<double>(m.num_groups);
    return m;
}

EquilibriumMetrics equilibrium_metrics(const SimTrace& trace, const Scenario& agents) {
    auto m = equilibrium_metrics(trace.final_partition, agents);
    m.iterations = trace.total_iterations;
    m.converged = trace.converged;
    return m;
}

std::uint64_t default_max_iterations(std::size_t n) noexcept {
    return 10 * static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(n) + 1);
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t xi, std::size_t ri, std::size_t rep) {
    return derive_seed(base_seed, {xi, ri, rep});
}

void SweepParams::validate() const {
    if (x_max_list.empty()) throw ParameterError("x_max list is empty");
    if (r_max_list.empty()) throw ParameterError("r_max list is empty");
    if (replications < 1) throw ParameterError("replications must be at least 1");
    if (m < 1) throw ParameterError("m must be at least 1");
    cfg.validate();
}

const SweepCell& SweepResult::cell(std::size_t xi, std::size_t ri) const {
    return cells.at(xi * params.r_max_list.size() + ri);
}

PotentialStats SweepResult::potential_totals() const {
    PotentialStats total;
    for (const auto& c : cells) {
        total.increases += c.potential.increases;
        total.equal += c.potential.equal;
        total.decreases += c.potential.decreases;
    }
    return total;
}

double SweepResult::potential_decrease_fraction() const {
    const auto t = potential_totals();
    return t.total() == 0 ? 0.0
                          : static_cast<double>(t.decreases) / static_cast<double>(t.total());
}

namespace {

MetricSummary summarize(const std::vector<double>& xs) {
    MetricSummary s;
    if (xs.empty()) return s;
    const double n = static_cast<double>(xs.size());
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / (n - 1.0));
    }
    return s;
}

struct RunOutcome {
    EquilibriumMetrics metrics;
    PotentialStats potential;
};

}  // namespace

SweepResult run_sweep(const SweepParams& params) { return run_sweep(params, nullptr); }

SweepResult run_sweep(const SweepParams& params,
                      const std::function<void(const RunRecord&)>& inspect) {
    params.validate();
    const std::size_t nx = params.x_max_list.size();
    const std::size_t nr = params.r_max_list.size();
    const std::size_t reps = params.replications;
    const std::size_t total = nx * nr * reps;
    const std::size_t n = params.m * params.cfg.k;
    const std::uint64_t max_iter =
        params.max_iterations ? params.max_iterations : default_max_iterations(n);

    // Each run writes only its own slot; aggregation happens afterwards in
    // index order so the result does not depend on scheduling.
    std::vector<RunOutcome> outcomes(total);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total) return;
            try {
                const std::size_t rep = job % reps;
                const std::size_t cell = job / reps;
                const std::size_t xi = cell / nr;
                const std::size_t ri = cell % nr;
                ScenarioParams sp;
                sp.m = params.m;
                sp.k = params.cfg.k;
                sp.x_max = params.x_max_list[xi];
                sp.y_max = params.x_max_list[xi];
                sp.r_max = params.r_max_list[ri];
                sp.integer_resources = params.integer_resources;
                sp.seed = cell_seed(params.base_seed, xi, ri, rep);
                const Scenario scenario = generate_scenario(sp);
                const std::uint64_t run_seed = splitmix64(sp.seed);
                RunOptions opts;
                opts.record_events = static_cast<bool>(inspect);
                SimTrace trace = run_to_convergence(scenario, params.cfg, run_seed, max_iter, opts);
                outcomes[job] = {equilibrium_metrics(trace, scenario), trace.potential};
                if (inspect) {
                    inspect(RunRecord{xi, ri, rep, sp.seed, scenario, std::move(trace)});
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(total);
                return;
            }
        }
    };

    std::size_t threads = params.threads ? params.threads : std::thread::hardware_concurrency();
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(total, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult result;
    result.params = params;
    result.cells.reserve(nx * nr);
    std::vector<double> groups, sizes, sectors, iters;
    for (std::size_t xi = 0; xi < nx; ++xi) {
        for (std::size_t ri = 0; ri < nr; ++ri) {
            groups.clear();
            sizes.clear();
            sectors.clear();
            iters.clear();
            SweepCell cell;
            cell.x_max = params.x_max_list[xi];
            cell.r_max = params.r_max_list[ri];
            cell.replications = reps;
            const std::size_t base = (xi * nr + ri) * reps;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const RunOutcome& o = outcomes[base + rep];
                groups.push_back(static_cast<double>(o.metrics.num_groups));
                sizes.push_back(o.metrics.mean_group_size);
                sectors.push_back(o.metrics.mean_sectors_per_group);
                iters.push_back(static_cast<double>(o.metrics.iterations));
                cell.max_iterations_seen = std::max(cell.max_iterations_seen, o.metrics.iterations);
                if (!o.metrics.converged) {
                    ++cell.failures;
                } else if (o.metrics.iterations <= params.iteration_threshold) {
                    ++cell.converged_within_threshold;
                }
                cell.potential.increases += o.potential.increases;
                cell.potential.equal += o.potential.equal;
                cell.potential.decreases += o.potential.decreases;
            }
            cell.num_groups = summarize(groups);
            cell.mean_group_size = summarize(sizes);
            cell.mean_sectors_per_group = summarize(sectors);
            cell.iterations = summarize(iters);
            result.cells.push_back(cell);
        }
    }
    return result;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return xs[l] < xs[r]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ParameterError("spearman: series lengths differ");
    if (a.size() < 2) return std::nullopt;
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return std::nullopt;
    return cov / std::sqrt(va * vb);
}

namespace {

std::string number_label(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

TrendReport trend_checks(const SweepResult& result) {
    const auto& xs = result.params.x_max_list;
    const auto& rs = result.params.r_max_list;
    TrendReport report;
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        std::vector<double> sizes;
        for (std::size_t ri = 0; ri < rs.size(); ++ri) {
            sizes.push_back(result.cell(xi, ri).mean_group_size.mean);
        }
        report.size_vs_resource_range.push_back(
            {"x_max=" + number_label(xs[xi]), spearman(rs, sizes)});
    }
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
        std::vector<double> groups;
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            groups.push_back(result.cell(xi, ri).num_groups.mean);
        }
        report.groups_vs_location_range.push_back(
            {"r_max=" + number_label(rs[ri]), spearman(xs, groups)});
    }
    std::vector<double> sizes, sectors;
    for (const auto& c : result.cells) {
        sizes.push_back(c.mean_group_size.mean);
        sectors.push_back(c.mean_sectors_per_group.mean);
    }
    report.sectors_vs_size = {"all cells", spearman(sizes, sectors)};
    report.potential_decrease_fraction = result.potential_decrease_fraction();
    return report;
}

}  // namespace groupform
