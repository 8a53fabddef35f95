#include <benchmark/benchmark.h>

#include <vector>

#include "qsuff/qsuff.hpp"

using namespace qsuff;

namespace {

Experiment product_family(Index d, std::size_t count, Rng& rng) {
  const Matrix tau = random_density(d, rng);
  std::vector<Matrix> states;
  for (std::size_t k = 0; k < count; ++k) states.push_back(kron(random_density(d, rng), tau));
  return build_dominating_state(std::move(states));
}

void BM_SubalgebraSufficiency(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  Rng rng(1);
  const Experiment exp = product_family(d, 3, rng);
  const MatrixStarAlgebra a = MatrixStarAlgebra::left_tensor_factor(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(subalgebra_sufficiency(exp, a));
}
BENCHMARK(BM_SubalgebraSufficiency)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SDecomposition(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  Rng rng(2);
  const Experiment exp = product_family(d, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(s_decomposition(exp));
}
BENCHMARK(BM_SDecomposition)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_SsaGap(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  Rng rng(3);
  const Matrix rho = random_density(d * d * d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ssa_gap(rho, {d, d, d}));
}
BENCHMARK(BM_SsaGap)->Arg(2)->Arg(3)->Arg(4);

void BM_MomentMatch(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  Rng rng(4);
  std::vector<Matrix> gens{random_hermitian(d, rng), random_hermitian(d, rng)};
  const ExponentialFamily fam = ExponentialFamily::around(random_density(d, rng), gens);
  const Matrix target = density_at(fam, {0.2, -0.1});
  std::vector<double> theta;
  for (const Matrix& a : fam.generators()) theta.push_back((target * a).trace().real());
  for (auto _ : state) benchmark::DoNotOptimize(moment_match(fam, theta));
}
BENCHMARK(BM_MomentMatch)->Arg(2)->Arg(4)->Arg(8);

void BM_TransitionProbability(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  Rng rng(5);
  const Matrix a = random_density(d, rng);
  const Matrix b = random_density(d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(transition_probability(a, b));
}
BENCHMARK(BM_TransitionProbability)->RangeMultiplier(2)->Range(2, 32);

}  // namespace

BENCHMARK_MAIN();
