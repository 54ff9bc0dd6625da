#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "abpole/abo.hpp"

using namespace abpole;

namespace {

// Cut disk meshes keyed by 1/h, built once per size.
const CrackedMesh& mesh_for(int inverse_h) {
  static std::map<int, std::shared_ptr<const AbSetup>> cache;
  auto& s = cache[inverse_h];
  if (!s) {
    AbMeshConfig cfg;
    cfg.h = 1.0 / inverse_h;
    s = make_ab_setup(cfg, {0.3, 0.0}, {0.35, 0.0}, 0.0);
  }
  return s->mesh;
}

template <Backend B>
void BM_AssembleSystem(benchmark::State& state) {
  const CrackedMesh& cm = mesh_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    StiffnessAndMass s = assemble_system(cm, B);
    benchmark::DoNotOptimize(s.K.lower.valuePtr());
    benchmark::DoNotOptimize(s.M.lower.valuePtr());
  }
  state.counters["triangles"] = static_cast<double>(cm.base.num_triangles());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cm.base.num_triangles()));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_AssembleSystem, Backend::Serial)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_AssembleSystem, Backend::Parallel)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
