#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maxcut/gnn.hpp"
#include "maxcut/graph.hpp"
#include "maxcut/heuristics.hpp"
#include "maxcut/types.hpp"

namespace maxcut {

enum class SolverId { Gcn, Sage, Greedy, Local, Eo, Random };

std::string_view solver_name(SolverId id);
std::optional<SolverId> solver_from_name(std::string_view name);

struct ExperimentSpec {
  Index d = 3;
  std::vector<Index> sizes;
  int samples_per_size = 20;
  std::vector<SolverId> solvers;
  RngSeed base_seed{42};
  TrainConfig train;  // seed field unused; per-cell seeds are derived
  EoConfig eo;        // ditto
  std::optional<Scalar> optimality_reference;
  int workers = 1;
};

void validate_spec(const ExperimentSpec& spec);

// One (instance, solver, seed) result row. Metric fields are empty when the
// solver failed (error holds the reason) and the energy fields additionally
// require an unweighted regular instance.
struct BenchRecord {
  Index n = 0;
  Index d = 0;
  SolverId solver = SolverId::Random;
  std::uint64_t seed = 0;
  std::uint64_t instance_hash = 0;
  std::optional<Scalar> cut;
  std::optional<Scalar> gamma;
  std::optional<Scalar> energy_density;
  std::optional<Scalar> figure_of_merit;
  double runtime_ms = 0;
  Index steps = 0;  // epochs for the GNN solvers, moves/steps otherwise
  std::string error;
};

// Field-wise equality with runtime_ms ignored; wall clock is the one field
// a re-run cannot reproduce.
bool same_record_ignoring_runtime(const BenchRecord& a, const BenchRecord& b);

// Seed derivation is a pure function of (base_seed, size, sample), so any
// sweep cell can be reproduced in isolation. Greedy and local share an order
// seed: local starts from exactly the greedy construction of the same cell.
RngSeed instance_seed(RngSeed base, Index size, int sample);
RngSeed solver_seed(RngSeed base, Index size, int sample, SolverId solver);

Graph make_instance(const ExperimentSpec& spec, Index size, int sample);

// Solver configuration for a single run outside a sweep.
struct SolveOptions {
  TrainConfig train;
  EoConfig eo;
  RngSeed seed{1};
};

// Run one solver on one instance; failures land in the error field.
BenchRecord solve_on(const Graph& g, SolverId solver, const SolveOptions& opts);

// One sweep cell, reproducible in isolation.
BenchRecord run_cell(const ExperimentSpec& spec, Index size, int sample,
                     SolverId solver);

// Full sweep: every selected solver sees the identical instance per
// (size, sample). Output order is (size ascending, sample, solver as listed)
// regardless of worker scheduling.
std::vector<BenchRecord> run_experiment(const ExperimentSpec& spec);

struct AggregateRow {
  Index n = 0;
  Scalar inverse_n = 0;
  Index d = 0;
  SolverId solver = SolverId::Random;
  int count = 0;   // successful records
  int failed = 0;  // records with a non-empty error
  Scalar mean_gamma = 0;
  std::optional<Scalar> stderr_gamma;  // absent for a single record
  std::optional<Scalar> mean_figure_of_merit;
  std::optional<Scalar> stderr_figure_of_merit;
  std::optional<Scalar> fom_over_reference;
};

// Per-(size, solver) mean and standard error of gamma and the figure of
// merit. When an optimality reference is supplied the ratio of the mean
// figure of merit to it is reported as well.
std::vector<AggregateRow> aggregate(std::span<const BenchRecord> records,
                                    std::optional<Scalar> reference = {});

// Least-squares slope of log(runtime_ms) vs log(n); needs >= 3 distinct
// sizes among the given records.
Scalar scaling_fit(std::span<const BenchRecord> records);

struct GsetReport {
  std::string file;
  Index n = 0;
  Index m = 0;
  BenchRecord record;
  std::optional<Scalar> best_known;
  std::optional<Scalar> gap;  // (best_known - cut) / best_known
};

GsetReport gset_report(const std::string& path, std::optional<Scalar> best_known,
                       SolverId solver, const SolveOptions& opts);

enum class RecordFormat { Csv, Json };

inline constexpr std::string_view kCsvHeader =
    "n,inverse_n,d,solver,seed,instance_hash,cut,gamma,energy_density,"
    "figure_of_merit,runtime_ms,steps,error";

void write_records(std::span<const BenchRecord> records, RecordFormat format,
                   std::ostream& out);
std::vector<BenchRecord> read_records(RecordFormat format, std::istream& in);

void write_aggregate_csv(std::span<const AggregateRow> rows, std::ostream& out);

// Flat "key value" configuration, one pair per line, '#' comments.
ExperimentSpec parse_experiment_config(std::istream& in);

}  // namespace maxcut
