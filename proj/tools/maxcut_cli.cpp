#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxcut/bench.hpp"
#include "maxcut/energy.hpp"
#include "maxcut/format.hpp"
#include "maxcut/gset.hpp"

namespace {

using namespace maxcut;

RecordFormat parse_format(const std::string& name) {
  return name == "json" ? RecordFormat::Json : RecordFormat::Csv;
}

template <typename Fn>
void with_output(const std::string& path, Fn fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(out);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

struct SolverFlags {
  TrainConfig train;
  EoConfig eo;
};

void add_solver_options(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--embedding-dim", f.train.embedding_dim,
                  "node embedding width (0: ceil(sqrt(n)) clamped to [10,100])");
  cmd->add_option("--hidden-dim", f.train.hidden_dim,
                  "hidden layer width (0: half the embedding width)");
  cmd->add_option("--learning-rate", f.train.learning_rate, "Adam learning rate");
  cmd->add_option("--max-epochs", f.train.max_epochs, "training epoch cap");
  cmd->add_option("--patience", f.train.patience,
                  "epochs without improvement before stopping");
  cmd->add_option("--tolerance", f.train.tolerance,
                  "minimum loss decrease that counts as improvement");
  cmd->add_option("--rounding-threshold", f.train.rounding_threshold,
                  "probability threshold for rounding to side 1");
  cmd->add_option("--restarts", f.train.restarts,
                  "independent training runs, best cut kept");
  cmd->add_option("--adam-beta1", f.train.adam_beta1, "Adam beta1");
  cmd->add_option("--adam-beta2", f.train.adam_beta2, "Adam beta2");
  cmd->add_option("--adam-eps", f.train.adam_eps, "Adam epsilon");
  cmd->add_option("--eo-tau", f.eo.tau, "extremal optimization rank exponent");
  cmd->add_option("--eo-steps", f.eo.steps,
                  "extremal optimization flips (-1: 200 * n)");
}

SolverId require_solver(const std::string& name) {
  const auto id = solver_from_name(name);
  if (!id) throw std::runtime_error("unknown solver '" + name + "'");
  return *id;
}

void print_scaling(const std::vector<BenchRecord>& records,
                   const ExperimentSpec& spec) {
  for (SolverId solver : spec.solvers) {
    std::vector<BenchRecord> subset;
    for (const BenchRecord& r : records)
      if (r.solver == solver) subset.push_back(r);
    try {
      const Scalar exponent = scaling_fit(subset);
      std::cerr << "scaling exponent (" << solver_name(solver)
                << "): " << format_number(exponent) << '\n';
    } catch (const std::exception&) {
      // Not enough clean sizes for a fit; nothing to report.
    }
  }
}

int run(int argc, char** argv) {
  CLI::App app{"MaxCut heuristics: GNN solvers, greedy baselines, benchmarks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random regular instance");
  Index gen_n = 0, gen_d = 3;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of nodes")->required();
  gen->add_option("--d", gen_d, "degree");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (default: stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  std::string solve_in, solve_solver, solve_out, solve_format = "csv";
  Index solve_n = 0, solve_d = 3;
  std::uint64_t solve_seed = 1;
  SolverFlags solve_flags;
  solve->add_option("--in", solve_in, "instance file (n m / u v w format)");
  solve->add_option("--n", solve_n, "generate an instance with this many nodes");
  solve->add_option("--d", solve_d, "degree of the generated instance");
  solve->add_option("--solver", solve_solver, "gcn|sage|greedy|local|eo|random")
      ->required();
  solve->add_option("--seed", solve_seed, "solver seed");
  solve->add_option("--format", solve_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  solve->add_option("--out", solve_out, "output file (default: stdout)");
  add_solver_options(solve, solve_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "run a sweep over sizes and solvers");
  std::string bench_config, bench_out, bench_agg_out, bench_format = "csv";
  std::vector<Index> bench_sizes;
  std::vector<std::string> bench_solvers;
  Index bench_d = 3;
  int bench_samples = 20, bench_workers = 1;
  std::uint64_t bench_seed = 42;
  Scalar bench_reference = 0;
  SolverFlags bench_flags;
  bench->add_option("--config", bench_config, "flat key-value sweep config file");
  auto* o_d = bench->add_option("--d", bench_d, "degree");
  auto* o_sizes =
      bench->add_option("--sizes", bench_sizes, "sizes to sweep")->delimiter(',');
  auto* o_samples = bench->add_option("--samples", bench_samples,
                                      "instances per size");
  auto* o_solvers =
      bench->add_option("--solvers", bench_solvers, "solvers to run")
          ->delimiter(',');
  auto* o_seed = bench->add_option("--base-seed", bench_seed, "sweep base seed");
  auto* o_workers = bench->add_option("--workers", bench_workers,
                                      "concurrent cells");
  auto* o_ref = bench->add_option("--optimality-reference", bench_reference,
                                  "reference figure of merit for ratios");
  bench->add_option("--out", bench_out, "records file (default: stdout)");
  bench->add_option("--aggregate-out", bench_agg_out,
                    "also write per-(n,solver) means to this CSV");
  bench->add_option("--format", bench_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_solver_options(bench, bench_flags);

  // gset
  auto* gset = app.add_subcommand("gset", "solve a benchmark file, report the gap");
  std::string gset_in, gset_solver = "local", gset_out, gset_format = "csv";
  std::uint64_t gset_seed = 1;
  double gset_best = 0;
  SolverFlags gset_flags;
  gset->add_option("--in", gset_in, "instance file")->required();
  auto* o_best = gset->add_option("--best-known", gset_best,
                                  "externally supplied best known cut");
  gset->add_option("--solver", gset_solver, "gcn|sage|greedy|local|eo|random");
  gset->add_option("--seed", gset_seed, "solver seed");
  gset->add_option("--format", gset_format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  gset->add_option("--out", gset_out, "also write the record here");
  add_solver_options(gset, gset_flags);

  // convert
  auto* convert = app.add_subcommand(
      "convert", "convert between cut density and energy figures");
  double conv_gamma = 0, conv_fom = 0;
  Index conv_d = 3;
  auto* o_gamma = convert->add_option("--gamma", conv_gamma, "cut density cut/n");
  auto* o_fom = convert->add_option("--figure-of-merit", conv_fom,
                                    "energy density over sqrt(d)");
  convert->add_option("--d", conv_d, "degree");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    const Graph g = generate_random_regular(gen_n, gen_d, RngSeed{gen_seed});
    if (gen_out.empty())
      serialize_gset(g, std::cout);
    else
      write_gset_file(g, gen_out);
    return 0;
  }

  if (solve->parsed()) {
    if (solve_in.empty() == (solve_n == 0))
      throw std::runtime_error("pass exactly one of --in or --n");
    const Graph g = solve_in.empty()
                        ? generate_random_regular(solve_n, solve_d,
                                                  RngSeed{solve_seed})
                        : read_gset_file(solve_in);
    const SolveOptions opts{solve_flags.train, solve_flags.eo,
                            RngSeed{solve_seed}};
    const BenchRecord rec = solve_on(g, require_solver(solve_solver), opts);
    with_output(solve_out, [&](std::ostream& out) {
      write_records({&rec, 1}, parse_format(solve_format), out);
    });
    return rec.error.empty() ? 0 : 1;
  }

  if (bench->parsed()) {
    ExperimentSpec spec;
    if (!bench_config.empty()) {
      std::ifstream in(bench_config);
      if (!in) throw std::runtime_error("cannot open '" + bench_config + "'");
      spec = parse_experiment_config(in);
    }
    if (o_d->count()) spec.d = bench_d;
    if (o_sizes->count()) spec.sizes = bench_sizes;
    if (o_samples->count()) spec.samples_per_size = bench_samples;
    if (o_solvers->count()) {
      spec.solvers.clear();
      for (const std::string& s : bench_solvers)
        spec.solvers.push_back(require_solver(s));
    }
    if (o_seed->count()) spec.base_seed = RngSeed{bench_seed};
    if (o_workers->count()) spec.workers = bench_workers;
    if (o_ref->count()) spec.optimality_reference = bench_reference;
    // Flags override whatever the config file set.
    auto apply_eo = [&](const CLI::Option* opt, auto member) {
      if (opt->count()) spec.eo.*member = bench_flags.eo.*member;
    };
    apply_eo(bench->get_option("--eo-tau"), &EoConfig::tau);
    apply_eo(bench->get_option("--eo-steps"), &EoConfig::steps);
    auto apply_if = [&](const CLI::Option* opt, auto member) {
      if (opt->count()) spec.train.*member = bench_flags.train.*member;
    };
    apply_if(bench->get_option("--embedding-dim"), &TrainConfig::embedding_dim);
    apply_if(bench->get_option("--hidden-dim"), &TrainConfig::hidden_dim);
    apply_if(bench->get_option("--learning-rate"), &TrainConfig::learning_rate);
    apply_if(bench->get_option("--max-epochs"), &TrainConfig::max_epochs);
    apply_if(bench->get_option("--patience"), &TrainConfig::patience);
    apply_if(bench->get_option("--tolerance"), &TrainConfig::tolerance);
    apply_if(bench->get_option("--rounding-threshold"),
             &TrainConfig::rounding_threshold);
    apply_if(bench->get_option("--restarts"), &TrainConfig::restarts);
    apply_if(bench->get_option("--adam-beta1"), &TrainConfig::adam_beta1);
    apply_if(bench->get_option("--adam-beta2"), &TrainConfig::adam_beta2);
    apply_if(bench->get_option("--adam-eps"), &TrainConfig::adam_eps);

    const std::vector<BenchRecord> records = run_experiment(spec);
    with_output(bench_out, [&](std::ostream& out) {
      write_records(records, parse_format(bench_format), out);
    });
    if (!bench_agg_out.empty()) {
      const auto rows = aggregate(records, spec.optimality_reference);
      with_output(bench_agg_out,
                  [&](std::ostream& out) { write_aggregate_csv(rows, out); });
    }
    print_scaling(records, spec);
    return 0;
  }

  if (gset->parsed()) {
    const SolveOptions opts{gset_flags.train, gset_flags.eo, RngSeed{gset_seed}};
    std::optional<Scalar> best;
    if (o_best->count()) best = gset_best;
    const GsetReport rep =
        gset_report(gset_in, best, require_solver(gset_solver), opts);
    std::cout << "file " << rep.file << '\n'
              << "n " << rep.n << '\n'
              << "m " << rep.m << '\n'
              << "solver " << solver_name(rep.record.solver) << '\n';
    if (rep.record.cut) std::cout << "cut " << format_number(*rep.record.cut) << '\n';
    if (rep.record.gamma)
      std::cout << "gamma " << format_number(*rep.record.gamma) << '\n';
    if (rep.best_known)
      std::cout << "best_known " << format_number(*rep.best_known) << '\n';
    if (rep.gap) std::cout << "gap " << format_number(*rep.gap) << '\n';
    if (!rep.record.error.empty())
      std::cout << "error " << rep.record.error << '\n';
    if (!gset_out.empty())
      with_output(gset_out, [&](std::ostream& out) {
        write_records({&rep.record, 1}, parse_format(gset_format), out);
      });
    return rep.record.error.empty() ? 0 : 1;
  }

  if (convert->parsed()) {
    if (o_gamma->count() == o_fom->count())
      throw std::runtime_error("pass exactly one of --gamma or --figure-of-merit");
    if (o_gamma->count()) {
      std::cout << "gamma " << format_number(conv_gamma) << '\n'
                << "energy_density "
                << format_number(energy_density_from_gamma(conv_gamma, conv_d))
                << '\n'
                << "figure_of_merit "
                << format_number(figure_of_merit_from_gamma(conv_gamma, conv_d))
                << '\n';
    } else {
      std::cout << "figure_of_merit " << format_number(conv_fom) << '\n'
                << "energy_density "
                << format_number(conv_fom * std::sqrt(static_cast<Scalar>(conv_d)))
                << '\n'
                << "gamma "
                << format_number(gamma_from_figure_of_merit(conv_fom, conv_d))
                << '\n';
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
