// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "riskbid/fpa.hpp"
#include "riskbid/safety.hpp"
#include "riskbid/spa.hpp"
#include "riskbid/verification.hpp"

using namespace riskbid;

namespace {

ValueModel mixture3() {
    return ValueModel::mixture(0.0, 1.0, 3, {{0.5, UniformDist{0.0, 1.0}}, {0.5, PowerDist{2.0}}});
}

void BM_SolveFpa(benchmark::State& state) {
    FpaScenario sc{mixture3()};
    sc.utility = UtilitySpec{Crra{0.5}};
    sc.grid = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_fpa(sc).bids.back());
}
BENCHMARK(BM_SolveFpa)->Arg(65)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

void BM_SolveSpaNoise(benchmark::State& state) {
    SpaScenario sc{mixture3()};
    sc.utility = UtilitySpec{Cara{2.0}};
    sc.win_payoff = WinPayoffSpec::additive(TruncatedNormalNoise{}, 0.2);
    sc.grid = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_spa(sc).bids.back());
}
BENCHMARK(BM_SolveSpaNoise)->Arg(65)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_AuditFpa(benchmark::State& state) {
    FpaScenario sc{mixture3()};
    const auto sol = solve_fpa(sc);
    AuditOptions o;
    o.deviation_grid_size = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(best_response_audit(sc, sol, o).max_gain);
}
BENCHMARK(BM_AuditFpa)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_MonteCarloFpa(benchmark::State& state) {
    const FpaScenario sc{ValueModel::iid(0.0, 1.0, 4, UniformDist{0.0, 1.0})};
    const auto sol = solve_fpa(sc);
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_auction(sc, sol, 100000, 1).mean_revenue);
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_MonteCarloFpa)->Unit(benchmark::kMillisecond);

void BM_IsSafer(benchmark::State& state) {
    const FiniteDecisionProblem p({5, 1, 3, 0, 7}, {4, 2, 3, 1, 6});
    for (auto _ : state) benchmark::DoNotOptimize(classify_safety(p).safer);
}
BENCHMARK(BM_IsSafer);

}  // namespace

BENCHMARK_MAIN();
