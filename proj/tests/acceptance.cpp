// Acceptance suite. Prints one PASS/FAIL line per criterion followed by
// indented detail lines, and exits nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "groupform/dynamics.hpp"
#include "groupform/experiments.hpp"
#include "groupform/oracle.hpp"
#include "groupform/persistence.hpp"
#include "groupform/render.hpp"

using namespace groupform;

namespace {

int g_failed = 0;

void verdict(bool ok, const char* id, const std::string& what) {
    std::printf("%s  %-4s %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failed;
}

template <class... Args>
void detail(const char* fmt, Args... args) {
    std::printf("        ");
    std::printf(fmt, args...);
    std::printf("\n");
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool close_rel(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::abs(want);
}

std::string sizes_key(const Partition& p) {
    std::vector<std::size_t> sizes;
    for (const auto& g : p.canonical()) sizes.push_back(g.size());
    std::sort(sizes.rbegin(), sizes.rend());
    std::string s;
    for (auto v : sizes) s += (s.empty() ? "" : "+") + std::to_string(v);
    return s;
}

bool is_3_2_2_2(const Partition& p) {
    std::vector<std::size_t> sizes;
    for (const auto& g : p.canonical()) sizes.push_back(g.size());
    std::sort(sizes.begin(), sizes.end());
    return sizes == std::vector<std::size_t>{2, 2, 2, 3};
}

const std::vector<double> kGridX{1, 10, 20, 40, 60, 80, 100};
const std::vector<double> kGridR{1, 20, 40, 60, 80, 100};

void criterion1() {
    struct Case {
        std::vector<double> totals;
        double h, r;
    };
    const std::vector<Case> cases{{{6, 0, 0}, 1.0, 6.0}, {{4, 2, 0}, 7.0 / 3.0, 14.0},
                                  {{2, 2, 2}, 3.0, 18.0}};
    bool ok = true;
    for (const auto& c : cases) {
        const double h = boosting_factor(c.totals);
        const double r = boosted_resource(c.totals);
        ok &= close_rel(h, c.h, 1e-12) && close_rel(r, c.r, 1e-12);
        detail("totals (%g,%g,%g): h = %.15g, R = %.15g", c.totals[0], c.totals[1], c.totals[2],
               h, r);
    }
    verdict(ok, "C1", "boosting factor and group resource on the three reference groups");
}

void criterion2() {
    Stopwatch sw;
    bool ok = true;
    std::size_t nonempty = 0, member = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        const std::size_t n = 3 + i % 6;
        Rng rng(derive_seed(0xC2, {i}));
        std::vector<Agent> agents;
        for (AgentId a = 0; a < n; ++a) {
            const std::size_t cat = rng.uniform_index(3);
            const double x = rng.uniform(0.0, 5.0);
            const double y = rng.uniform(0.0, 5.0);
            const double r = rng.uniform(1.0, 20.0);
            agents.push_back({a, Category{cat}, r, Point{x, y}});
        }
        const Scenario s(3, std::move(agents));
        const auto ise = enumerate_all_ise(s, {});
        const auto t = run_to_convergence(s, {}, rng.next_u64(), default_max_iterations(n));
        const auto g = t.final_partition.canonical();
        nonempty += !ise.empty();
        member += t.converged && std::find(ise.begin(), ise.end(), g) != ise.end();
    }
    ok = nonempty == 100 && member == 100;
    detail("%zu/100 nonempty ISE sets, %zu/100 engine outputs in the set (%.1f s)", nonempty,
           member, sw.seconds());
    verdict(ok && sw.seconds() < 120, "C2", "engine equilibria match the exhaustive oracle");
}

void criterion3_and_8() {
    Stopwatch sw;
    std::size_t converged = 0, clean = 0;
    std::uint64_t accepted = 0, logged = 0;
    PotentialStats stats;
    for (std::size_t i = 0; i < 1000; ++i) {
        const std::size_t cell = i % (kGridX.size() * kGridR.size());
        const std::size_t xi = cell / kGridR.size();
        const std::size_t ri = cell % kGridR.size();
        ScenarioParams sp;
        sp.x_max = sp.y_max = kGridX[xi];
        sp.r_max = kGridR[ri];
        sp.seed = cell_seed(0xC3, xi, ri, i);
        const auto s = generate_scenario(sp);
        const auto t = run_to_convergence(s, {}, splitmix64(sp.seed), default_max_iterations(15));
        if (!t.converged) continue;
        ++converged;
        clean += verify_ise(t.final_partition, s, {}).violations.empty();
        for (const auto& e : t.events) {
            if (!e.accepted_move) continue;
            ++accepted;
            logged += e.potential_change.has_value();
        }
        stats.increases += t.potential.increases;
        stats.equal += t.potential.equal;
        stats.decreases += t.potential.decreases;
    }
    detail("%zu/1000 converged, %zu with zero violations (%.1f s)", converged, clean,
           sw.seconds());
    verdict(converged == 1000 && clean == 1000 && sw.seconds() < 120, "C3",
            "every converged n = 15 partition is individually stable");

    const double frac = stats.total() ? static_cast<double>(stats.decreases) /
                                            static_cast<double>(stats.total())
                                      : 0.0;
    detail("%llu accepted updates, %llu with a logged comparison",
           static_cast<unsigned long long>(accepted), static_cast<unsigned long long>(logged));
    detail("increase %llu, equal %llu, decrease %llu; decrease fraction %.6f",
           static_cast<unsigned long long>(stats.increases),
           static_cast<unsigned long long>(stats.equal),
           static_cast<unsigned long long>(stats.decreases), frac);
    verdict(accepted == logged && accepted == stats.total(), "C8",
            "potential comparison logged for every accepted update (diagnostic)");
}

void criterion4() {
    Stopwatch sw;
    SweepParams p;
    p.replications = 1000;
    p.threads = 0;
    const auto res = run_sweep(p);
    bool ok = true;
    double worst = 1.0;
    std::uint64_t max_seen = 0;
    for (const auto& c : res.cells) {
        const double frac = static_cast<double>(c.converged_within_threshold) /
                            static_cast<double>(c.replications);
        worst = std::min(worst, frac);
        max_seen = std::max(max_seen, c.max_iterations_seen);
        const bool cell_ok = frac >= 0.99 && c.failures == 0;
        ok &= cell_ok;
        if (!cell_ok) {
            detail("cell x_max=%g r_max=%g: %.3f within 200, %zu unconverged", c.x_max, c.r_max,
                   frac, c.failures);
        }
    }
    detail("worst cell %.4f within 200 attempts; max attempts seen %llu of budget %llu (%.1f s)",
           worst, static_cast<unsigned long long>(max_seen),
           static_cast<unsigned long long>(default_max_iterations(15)), sw.seconds());
    verdict(ok, "C4", ">= 99% of runs per cell converge within 200 attempts, all within budget");
}

void criterion5() {
    Stopwatch sw;
    SweepParams p;
    p.replications = 200;
    p.base_seed = 0;
    p.threads = 0;
    const auto res = run_sweep(p);
    const auto trends = trend_checks(res);
    const double secs = sw.seconds();

    bool a = true;
    for (const auto& s : trends.size_vs_resource_range) {
        const bool ok = s.correlation && *s.correlation >= 0.8;
        a &= ok;
        detail("%-10s rho = %s", s.label.c_str(),
               s.correlation ? std::to_string(*s.correlation).c_str() : "undefined");
    }
    for (std::size_t xi = 0; xi < kGridX.size(); ++xi) {
        std::string row;
        for (std::size_t ri = 0; ri < kGridR.size(); ++ri) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.3f", res.cell(xi, ri).mean_group_size.mean);
            row += buf;
        }
        detail("x_max=%-3g mean_group_size:%s", kGridX[xi], row.c_str());
    }
    double max_se = 0.0;
    for (std::size_t ri = 0; ri < kGridR.size(); ++ri) {
        const auto& c = res.cell(0, ri);
        max_se = std::max(max_se, c.mean_group_size.std / std::sqrt(double(c.replications)));
    }
    detail("x_max=1 row: largest standard error of a cell mean %.4f", max_se);
    verdict(a, "C5a", "mean group size rises with r_max in every x_max row (rho >= 0.8)");

    bool b = true;
    for (const auto& s : trends.groups_vs_location_range) {
        b &= s.correlation && *s.correlation >= 0.8;
        detail("%-10s rho = %s", s.label.c_str(),
               s.correlation ? std::to_string(*s.correlation).c_str() : "undefined");
    }
    verdict(b, "C5b", "group count rises with x_max in every r_max column (rho >= 0.8)");

    const auto& c = trends.sectors_vs_size.correlation;
    detail("rho = %s", c ? std::to_string(*c).c_str() : "undefined");
    verdict(c && *c >= 0.8, "C5c", "sectors per group rise with group size across cells");

    const auto& lo = res.cell(kGridX.size() - 1, 0);
    const auto& hi = res.cell(kGridX.size() - 1, kGridR.size() - 1);
    const bool d1 = lo.mean_group_size.mean >= 1.0 && lo.mean_group_size.mean <= 1.1 &&
                    lo.mean_sectors_per_group.mean >= 1.0 &&
                    lo.mean_sectors_per_group.mean <= 1.1;
    const bool d2 = hi.mean_sectors_per_group.mean > 1.5;
    detail("(100, 1): size %.4f, sectors %.4f -> %s", lo.mean_group_size.mean,
           lo.mean_sectors_per_group.mean, d1 ? "ok" : "out of range");
    detail("(100, 100): size %.4f, sectors %.4f -> %s", hi.mean_group_size.mean,
           hi.mean_sectors_per_group.mean, d2 ? "ok" : "not above 1.5");
    verdict(d1 && d2, "C5d", "extreme cells (100, 1) and (100, 100)");
    detail("sweep of 42 x 200 runs took %.1f s", secs);
    verdict(secs < 600, "C5t", "trend sweep runtime under 10 minutes");
}

void criterion6() {
    const auto s = load_scenario(std::string(GROUPFORM_DATA_DIR) + "/example2.json").scenario;
    std::size_t converged = 0, stable = 0, target = 0;
    std::map<std::string, std::size_t> shapes;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto t = run_to_convergence(s, {}, seed, default_max_iterations(s.size()));
        converged += t.converged;
        stable += t.converged && verify_ise(t.final_partition, s, {}).is_ise;
        target += is_3_2_2_2(t.final_partition);
        ++shapes[sizes_key(t.final_partition)];
    }
    detail("%zu/100 converged, %zu/100 pass the ISE check, %zu/100 end as 3+2+2+2", converged,
           stable, target);
    for (const auto& [k, v] : shapes) detail("group sizes %-14s %zu seeds", k.c_str(), v);

    const auto all = enumerate_all_ise(s, {});
    std::map<std::string, std::size_t> ise_shapes;
    for (const auto& g : all) ++ise_shapes[sizes_key(Partition::from_groups(g, s.size()))];
    detail("exhaustive: %zu equilibria of the fixture", all.size());
    for (const auto& [k, v] : ise_shapes) detail("  equilibrium sizes %-14s %zu", k.c_str(), v);

    // Context only: the same fixture with a weaker distance decay.
    const GameConfig weak{3, 0.5};
    std::size_t weak_target = 0;
    const auto weak_all = enumerate_all_ise(s, weak);
    for (const auto& g : weak_all) weak_target += is_3_2_2_2(Partition::from_groups(g, s.size()));
    std::size_t weak_seeds = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        weak_seeds += is_3_2_2_2(
            run_to_convergence(s, weak, seed, default_max_iterations(s.size())).final_partition);
    }
    detail("lambda = 0.5 (not a criterion): %zu of %zu equilibria and %zu/100 seeds are 3+2+2+2",
           weak_target, weak_all.size(), weak_seeds);

    verdict(converged == 100 && stable == 100 && target >= 1, "C6",
            "fixture converges for seeds 0..99, all stable, some seed ends as 3+2+2+2");
}

void criterion7() {
    bool ok = true;
    const auto ex = load_scenario(std::string(GROUPFORM_DATA_DIR) + "/example2.json").scenario;
    ScenarioParams sp;
    sp.seed = 77;
    const auto gen = generate_scenario(sp);
    for (const Scenario* s : {&ex, &gen}) {
        for (std::uint64_t seed : {0u, 7u, 12345u}) {
            const auto run = [&] {
                return make_trace_file(
                    *s, run_to_convergence(*s, {}, seed, default_max_iterations(s->size())));
            };
            const auto a = run();
            const auto b = run();
            const auto ta = trace_to_string(a);
            ok &= ta == trace_to_string(b);
            ok &= trace_to_string(trace_from_string(ta)) == ta;
            const auto fa = render_trace(a, {});
            const auto fb = render_trace(b, {});
            ok &= fa.size() == fb.size();
            for (std::size_t i = 0; ok && i < fa.size(); ++i) ok &= fa[i].svg == fb[i].svg;
        }
    }
    detail("traces and SVG frames: %s", ok ? "byte-identical" : "differ");

    SweepParams p;
    p.replications = 20;
    p.threads = 1;
    const auto one = run_sweep(p);
    p.threads = 4;
    const auto four = run_sweep(p);
    p.threads = 0;
    const auto all = run_sweep(p);
    const bool sweep_ok = sweep_to_csv(one) == sweep_to_csv(four) &&
                          sweep_to_json(one) == sweep_to_json(four) &&
                          sweep_to_csv(one) == sweep_to_csv(all);
    detail("sweep outputs across 1, 4 and all threads: %s", sweep_ok ? "byte-identical" : "differ");
    verdict(ok && sweep_ok, "C7", "deterministic traces, SVGs and sweeps");
}

}  // namespace

int main() {
    Stopwatch total;
    criterion1();
    criterion2();
    criterion3_and_8();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("%d criterion line(s) failed; total %.1f s\n", g_failed, total.seconds());
    return g_failed == 0 ? 0 : 1;
}
