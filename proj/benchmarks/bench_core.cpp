#include <benchmark/benchmark.h>

#include <memory>

#include "acflow/assembly.hpp"
#include "acflow/linear_solver.hpp"
#include "acflow/mms.hpp"
#include "acflow/scheme.hpp"

namespace {

using namespace acflow;

// Mesh size is passed as 1/h.
std::shared_ptr<const FeSpace> p2_disk(const benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  return std::make_shared<const FeSpace>(std::make_shared<const Mesh>(generate_mesh(DiskShape{1.0}, h)), 2);
}

void BM_GenerateDisk(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_mesh(DiskShape{1.0}, h));
}
BENCHMARK(BM_GenerateDisk)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_AssembleStrainStiffness(benchmark::State& state) {
  const auto space = p2_disk(state);
  const Assembler assembler(space);
  for (auto _ : state) benchmark::DoNotOptimize(assembler.assemble(form::StiffnessEps{}, Components::vector));
  state.counters["dofs"] = static_cast<double>(2 * space->num_dofs());
}
BENCHMARK(BM_AssembleStrainStiffness)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

SparseMatrix momentum_operator(const std::shared_ptr<const FeSpace>& space) {
  const Assembler assembler(space);
  SparseMatrix a = assembler.assemble(form::Mass{}, Components::vector);
  a.scale(1.0 / 0.025);
  a.add_scaled(2.2, assembler.assemble(form::StiffnessEps{}, Components::vector));
  a.add_scaled(1.21, assembler.assemble(form::GradDiv{}, Components::vector));
  return a;
}

void BM_FactorMomentumOperator(benchmark::State& state) {
  const SparseMatrix a = momentum_operator(p2_disk(state));
  for (auto _ : state) benchmark::DoNotOptimize(Factorization(a));
  state.counters["dofs"] = static_cast<double>(a.size());
}
BENCHMARK(BM_FactorMomentumOperator)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SolveWithFactorization(benchmark::State& state) {
  const SparseMatrix a = momentum_operator(p2_disk(state));
  const Factorization f(a);
  const std::vector<double> b(a.size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(f.solve(b));
}
BENCHMARK(BM_SolveWithFactorization)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void integrator_step(benchmark::State& state, SchemeVariant variant) {
  const ManufacturedCase& c = find_case("disk_linear_eta_10");
  const double h = 1.0 / static_cast<double>(state.range(0));
  IntegratorOptions o;
  o.variant = variant;
  o.tau = h / 2;
  o.check_invariants = false;
  Integrator integ(std::make_shared<const Mesh>(generate_mesh(c.domain, h)), c.law, case_forcing(c), o,
                   case_initial_condition(c));
  FlowState s = integ.initial_state();
  for (auto _ : state) s = integ.advance(s);
}

void BM_StepSemiImplicit(benchmark::State& state) { integrator_step(state, SchemeVariant::semi_implicit); }
BENCHMARK(BM_StepSemiImplicit)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_StepExplicit(benchmark::State& state) { integrator_step(state, SchemeVariant::explicit_transport); }
BENCHMARK(BM_StepExplicit)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
