// Scratch probe: joint distribution of the two assumption diagnostics.
#include <cstdio>

#include "musvm/span_bound.hpp"
#include "synthetic.hpp"

using namespace musvm;
namespace mt = musvm::testing;

int main() {
  SolverConfig cfg;
  cfg.tol = 1e-10;
  int a2_one = 0, a1_one = 0, both = 0, runs = 0, held_q = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    mt::SyntheticSpec spec;
    spec.seed = 101 + seed * 3;
    spec.L = 3;
    spec.d = 50;
    spec.n_per_class = 7;
    spec.m = seed % 2 == 0 ? 5 : 0;
    spec.center_scale = 4.0;
    spec.class_noise = 0.3;
    spec.universum_noise = 0.15;
    const mt::Synthetic syn = mt::make_synthetic(spec);
    TrainParams params;
    params.kernel = KernelSpec::linear();
    params.C = 1.0;
    params.cstar = spec.m > 0 ? default_cstar_ratio(21, 5, 3) : 0.0;
    params.delta = 0.05;
    const Trained t = train(syn.ds, params, cfg);
    if (!t.solution.converged()) continue;
    ++runs;
    const SpanReport rep = loo_bound(t.solution, t.partition, t.gram, t.problem);
    const LooResult loo = exact_loo(t.problem, t.gram, cfg);
    const bool a2 = rep.assumption2_fraction == 1.0;
    const bool a1 = loo.assumption1_fraction == 1.0;
    if (a2) ++a2_one;
    if (a1) ++a1_one;
    if (a2 && a1) {
      ++both;
      if (rep.bound >= loo.error_rate) ++held_q;
    }
    if (seed < 14) {
      std::printf("seed %3llu: |SV1|=%2d a2=%.3f a1=%.3f bound=%.3f loo=%.3f\n",
                  static_cast<unsigned long long>(spec.seed),
                  static_cast<int>(t.partition.sv1.size()),
                  rep.assumption2_fraction, loo.assumption1_fraction,
                  rep.bound, loo.error_rate);
    }
  }
  std::printf("runs=%d a2==1: %d  a1==1: %d  both: %d held_q: %d\n", runs,
              a2_one, a1_one, both, held_q);
  return 0;
}
