#include "maxcut/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "maxcut/format.hpp"
#include "maxcut/gset.hpp"
#include "maxcut/rng.hpp"

namespace maxcut {

namespace {

// Derivation tags. Greedy and local share the order tag on purpose: the
// local solver polishes exactly the greedy construction of the same cell.
constexpr std::uint64_t kInstanceTag = 0x01;
constexpr std::uint64_t kOrderTag = 0x10;
constexpr std::uint64_t kEoTag = 0x20;
constexpr std::uint64_t kRandomTag = 0x30;
constexpr std::uint64_t kGcnTag = 0x40;
constexpr std::uint64_t kSageTag = 0x50;

std::uint64_t family_tag(SolverId id) {
  switch (id) {
    case SolverId::Greedy:
    case SolverId::Local:
      return kOrderTag;
    case SolverId::Eo:
      return kEoTag;
    case SolverId::Random:
      return kRandomTag;
    case SolverId::Gcn:
      return kGcnTag;
    case SolverId::Sage:
      return kSageTag;
  }
  return 0;
}

CutAssignment random_assignment(Index n, RngSeed seed) {
  auto engine = make_engine(seed);
  std::bernoulli_distribution coin(0.5);
  CutAssignment x(n);
  for (Index i = 0; i < n; ++i) x[i] = coin(engine) ? 1 : 0;
  return x;
}

void fill_metrics(BenchRecord& rec, const Graph& g, const CutAssignment& x) {
  const CutMetrics m = cut_metrics(g, x);
  rec.cut = m.cut;
  rec.gamma = m.gamma;
  rec.energy_density = m.energy_density;
  rec.figure_of_merit = m.figure_of_merit;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string_view solver_name(SolverId id) {
  switch (id) {
    case SolverId::Gcn: return "gcn";
    case SolverId::Sage: return "sage";
    case SolverId::Greedy: return "greedy";
    case SolverId::Local: return "local";
    case SolverId::Eo: return "eo";
    case SolverId::Random: return "random";
  }
  return "?";
}

std::optional<SolverId> solver_from_name(std::string_view name) {
  for (SolverId id : {SolverId::Gcn, SolverId::Sage, SolverId::Greedy,
                      SolverId::Local, SolverId::Eo, SolverId::Random})
    if (name == solver_name(id)) return id;
  return std::nullopt;
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.sizes.empty()) throw std::invalid_argument("spec needs at least one size");
  for (Index n : spec.sizes)
    if (n <= 0) throw std::invalid_argument("sizes must be positive");
  if (spec.samples_per_size < 1)
    throw std::invalid_argument("samples_per_size must be >= 1");
  if (spec.solvers.empty())
    throw std::invalid_argument("spec needs at least one solver");
  if (spec.d <= 0) throw std::invalid_argument("degree must be positive");
  if (spec.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (spec.optimality_reference && *spec.optimality_reference == 0.0)
    throw std::invalid_argument("optimality reference must be nonzero");
}

RngSeed instance_seed(RngSeed base, Index size, int sample) {
  return derive_seed(base, kInstanceTag, static_cast<std::uint64_t>(size),
                     static_cast<std::uint64_t>(sample));
}

RngSeed solver_seed(RngSeed base, Index size, int sample, SolverId solver) {
  return derive_seed(instance_seed(base, size, sample), family_tag(solver));
}

Graph make_instance(const ExperimentSpec& spec, Index size, int sample) {
  return generate_random_regular(size, spec.d,
                                 instance_seed(spec.base_seed, size, sample));
}

BenchRecord solve_on(const Graph& g, SolverId solver, const SolveOptions& opts) {
  BenchRecord rec;
  rec.n = g.num_nodes();
  const DegreeStats ds = degree_stats(g);
  rec.d = ds.is_regular ? ds.regular_degree : 0;
  rec.solver = solver;
  rec.seed = opts.seed.value;
  rec.instance_hash = graph_hash(g);

  try {
    switch (solver) {
      case SolverId::Gcn:
      case SolverId::Sage: {
        TrainConfig cfg = opts.train;
        cfg.kind = solver == SolverId::Gcn ? LayerKind::Gcn : LayerKind::Sage;
        cfg.seed = opts.seed;
        const SolveResult res = solve_pignn(g, cfg);
        rec.cut = res.metrics.cut;
        rec.gamma = res.metrics.gamma;
        rec.energy_density = res.metrics.energy_density;
        rec.figure_of_merit = res.metrics.figure_of_merit;
        rec.runtime_ms = res.runtime_ms;
        rec.steps = res.epochs;
        break;
      }
      case SolverId::Greedy: {
        const auto start = std::chrono::steady_clock::now();
        const auto order = random_permutation(g.num_nodes(), opts.seed);
        const CutAssignment x = greedy_construct(g, order);
        rec.runtime_ms = elapsed_ms(start);
        rec.steps = g.num_nodes();
        fill_metrics(rec, g, x);
        break;
      }
      case SolverId::Local: {
        const auto start = std::chrono::steady_clock::now();
        const auto order = random_permutation(g.num_nodes(), opts.seed);
        Index flips = 0;
        const CutAssignment x =
            local_search_1flip(g, greedy_construct(g, order), &flips);
        rec.runtime_ms = elapsed_ms(start);
        rec.steps = g.num_nodes() + flips;
        fill_metrics(rec, g, x);
        break;
      }
      case SolverId::Eo: {
        const auto start = std::chrono::steady_clock::now();
        EoConfig cfg = opts.eo;
        cfg.seed = derive_seed(opts.seed, 1);
        const CutAssignment x0 =
            random_assignment(g.num_nodes(), derive_seed(opts.seed, 0));
        const CutAssignment x = extremal_optimization(g, x0, cfg);
        rec.runtime_ms = elapsed_ms(start);
        rec.steps = cfg.steps == -1 ? 200 * g.num_nodes() : cfg.steps;
        fill_metrics(rec, g, x);
        break;
      }
      case SolverId::Random: {
        const auto start = std::chrono::steady_clock::now();
        const CutAssignment x = random_assignment(g.num_nodes(), opts.seed);
        rec.runtime_ms = elapsed_ms(start);
        rec.steps = 0;
        fill_metrics(rec, g, x);
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.cut.reset();
    rec.gamma.reset();
    rec.energy_density.reset();
    rec.figure_of_merit.reset();
  }
  return rec;
}

BenchRecord run_cell(const ExperimentSpec& spec, Index size, int sample,
                     SolverId solver) {
  const RngSeed seed = solver_seed(spec.base_seed, size, sample, solver);
  try {
    const Graph g = make_instance(spec, size, sample);
    return solve_on(g, solver, {spec.train, spec.eo, seed});
  } catch (const std::exception& e) {
    BenchRecord rec;
    rec.n = size;
    rec.d = spec.d;
    rec.solver = solver;
    rec.seed = seed.value;
    rec.error = e.what();
    return rec;
  }
}

std::vector<BenchRecord> run_experiment(const ExperimentSpec& spec) {
  validate_spec(spec);

  std::vector<Index> sizes = spec.sizes;
  std::stable_sort(sizes.begin(), sizes.end());

  struct Cell {
    Index size;
    int sample;
    SolverId solver;
  };
  std::vector<Cell> cells;
  for (Index size : sizes)
    for (int sample = 0; sample < spec.samples_per_size; ++sample)
      for (SolverId solver : spec.solvers) cells.push_back({size, sample, solver});

  std::vector<BenchRecord> records(cells.size());
  if (spec.workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      records[i] = run_cell(spec, cells[i].size, cells[i].sample, cells[i].solver);
    return records;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      records[i] = run_cell(spec, cells[i].size, cells[i].sample, cells[i].solver);
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(
      static_cast<std::size_t>(spec.workers), cells.size());
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return records;
}

bool same_record_ignoring_runtime(const BenchRecord& a, const BenchRecord& b) {
  return a.n == b.n && a.d == b.d && a.solver == b.solver && a.seed == b.seed &&
         a.instance_hash == b.instance_hash && a.cut == b.cut &&
         a.gamma == b.gamma && a.energy_density == b.energy_density &&
         a.figure_of_merit == b.figure_of_merit && a.steps == b.steps &&
         a.error == b.error;
}

std::vector<AggregateRow> aggregate(std::span<const BenchRecord> records,
                                    std::optional<Scalar> reference) {
  if (records.empty())
    throw std::invalid_argument("cannot aggregate an empty record list");

  struct Bucket {
    std::vector<Scalar> gamma;
    std::vector<Scalar> fom;
    int failed = 0;
  };
  std::map<std::tuple<Index, Index, int>, Bucket> groups;
  for (const BenchRecord& r : records) {
    Bucket& b = groups[{r.n, r.d, static_cast<int>(r.solver)}];
    if (!r.error.empty()) {
      ++b.failed;
      continue;
    }
    if (r.gamma) b.gamma.push_back(*r.gamma);
    if (r.figure_of_merit) b.fom.push_back(*r.figure_of_merit);
  }

  auto mean_of = [](const std::vector<Scalar>& xs) {
    Scalar s = 0;
    for (Scalar x : xs) s += x;
    return s / static_cast<Scalar>(xs.size());
  };
  auto stderr_of = [&](const std::vector<Scalar>& xs, Scalar mean)
      -> std::optional<Scalar> {
    if (xs.size() < 2) return std::nullopt;
    Scalar ss = 0;
    for (Scalar x : xs) ss += (x - mean) * (x - mean);
    const Scalar var = ss / static_cast<Scalar>(xs.size() - 1);
    return std::sqrt(var / static_cast<Scalar>(xs.size()));
  };

  std::vector<AggregateRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, bucket] : groups) {
    AggregateRow row;
    row.n = std::get<0>(key);
    row.inverse_n = 1.0 / static_cast<Scalar>(row.n);
    row.d = std::get<1>(key);
    row.solver = static_cast<SolverId>(std::get<2>(key));
    row.count = static_cast<int>(bucket.gamma.size());
    row.failed = bucket.failed;
    if (!bucket.gamma.empty()) {
      row.mean_gamma = mean_of(bucket.gamma);
      row.stderr_gamma = stderr_of(bucket.gamma, row.mean_gamma);
    }
    if (!bucket.fom.empty()) {
      row.mean_figure_of_merit = mean_of(bucket.fom);
      row.stderr_figure_of_merit = stderr_of(bucket.fom, *row.mean_figure_of_merit);
      if (reference) row.fom_over_reference = *row.mean_figure_of_merit / *reference;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Scalar scaling_fit(std::span<const BenchRecord> records) {
  std::vector<std::pair<Scalar, Scalar>> points;
  std::vector<Index> sizes;
  for (const BenchRecord& r : records) {
    if (!r.error.empty()) continue;
    if (!(r.runtime_ms > 0))
      throw std::invalid_argument("scaling fit needs positive runtimes");
    points.emplace_back(std::log(static_cast<Scalar>(r.n)),
                        std::log(r.runtime_ms));
    sizes.push_back(r.n);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.size() < 3)
    throw std::invalid_argument("scaling fit needs at least 3 distinct sizes");

  Scalar mx = 0, my = 0;
  for (const auto& [x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<Scalar>(points.size());
  my /= static_cast<Scalar>(points.size());
  Scalar sxy = 0, sxx = 0;
  for (const auto& [x, y] : points) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

GsetReport gset_report(const std::string& path, std::optional<Scalar> best_known,
                       SolverId solver, const SolveOptions& opts) {
  if (best_known && *best_known == 0.0)
    throw std::invalid_argument("best_known must be nonzero");
  const Graph g = read_gset_file(path);

  GsetReport rep;
  rep.file = path;
  rep.n = g.num_nodes();
  rep.m = g.num_edges();
  rep.record = solve_on(g, solver, opts);
  rep.best_known = best_known;
  if (best_known && rep.record.cut)
    rep.gap = (*best_known - *rep.record.cut) / *best_known;
  return rep;
}

namespace {

std::string csv_escape(std::string s) {
  // Rows are line-based; fold any newline in an error message into a space.
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt_field(const std::optional<Scalar>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

Scalar to_scalar(const std::string& s) {
  Scalar v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad numeric field '" + s + "'");
  return v;
}

template <typename T>
T to_integer(const std::string& s) {
  T v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer field '" + s + "'");
  return v;
}

std::optional<Scalar> to_opt_scalar(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_scalar(s);
}

void write_csv(std::span<const BenchRecord> records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    out << r.n << ',' << format_number(1.0 / static_cast<Scalar>(r.n)) << ','
        << r.d << ',' << solver_name(r.solver) << ',' << r.seed << ','
        << r.instance_hash << ',' << opt_field(r.cut) << ','
        << opt_field(r.gamma) << ',' << opt_field(r.energy_density) << ','
        << opt_field(r.figure_of_merit) << ',' << format_number(r.runtime_ms)
        << ',' << r.steps << ',' << csv_escape(r.error) << '\n';
  }
}

std::vector<BenchRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw std::invalid_argument("unexpected CSV header '" + line + "'");

  std::vector<BenchRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 13)
      throw std::invalid_argument("expected 13 CSV fields, got " +
                                  std::to_string(fields.size()));
    BenchRecord r;
    r.n = to_integer<Index>(fields[0]);
    // fields[1] is inverse_n, derived from n on output.
    r.d = to_integer<Index>(fields[2]);
    const auto solver = solver_from_name(fields[3]);
    if (!solver) throw std::invalid_argument("unknown solver '" + fields[3] + "'");
    r.solver = *solver;
    r.seed = to_integer<std::uint64_t>(fields[4]);
    r.instance_hash = to_integer<std::uint64_t>(fields[5]);
    r.cut = to_opt_scalar(fields[6]);
    r.gamma = to_opt_scalar(fields[7]);
    r.energy_density = to_opt_scalar(fields[8]);
    r.figure_of_merit = to_opt_scalar(fields[9]);
    r.runtime_ms = to_scalar(fields[10]);
    r.steps = to_integer<Index>(fields[11]);
    r.error = fields[12];
    records.push_back(std::move(r));
  }
  return records;
}

nlohmann::json record_to_json(const BenchRecord& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["inverse_n"] = 1.0 / static_cast<Scalar>(r.n);
  j["d"] = r.d;
  j["solver"] = std::string(solver_name(r.solver));
  j["seed"] = r.seed;
  j["instance_hash"] = r.instance_hash;
  auto opt = [](const std::optional<Scalar>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j["cut"] = opt(r.cut);
  j["gamma"] = opt(r.gamma);
  j["energy_density"] = opt(r.energy_density);
  j["figure_of_merit"] = opt(r.figure_of_merit);
  j["runtime_ms"] = r.runtime_ms;
  j["steps"] = r.steps;
  j["error"] = r.error;
  return j;
}

BenchRecord record_from_json(const nlohmann::json& j) {
  BenchRecord r;
  r.n = j.at("n").get<Index>();
  r.d = j.at("d").get<Index>();
  const auto solver = solver_from_name(j.at("solver").get<std::string>());
  if (!solver)
    throw std::invalid_argument("unknown solver '" +
                                j.at("solver").get<std::string>() + "'");
  r.solver = *solver;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.instance_hash = j.at("instance_hash").get<std::uint64_t>();
  auto opt = [&j](const char* key) -> std::optional<Scalar> {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<Scalar>();
  };
  r.cut = opt("cut");
  r.gamma = opt("gamma");
  r.energy_density = opt("energy_density");
  r.figure_of_merit = opt("figure_of_merit");
  r.runtime_ms = j.at("runtime_ms").get<double>();
  r.steps = j.at("steps").get<Index>();
  r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace

void write_records(std::span<const BenchRecord> records, RecordFormat format,
                   std::ostream& out) {
  if (format == RecordFormat::Csv) {
    write_csv(records, out);
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchRecord& r : records) arr.push_back(record_to_json(r));
  out << arr.dump(2) << '\n';
}

std::vector<BenchRecord> read_records(RecordFormat format, std::istream& in) {
  if (format == RecordFormat::Csv) return read_csv(in);
  nlohmann::json arr = nlohmann::json::parse(in);
  if (!arr.is_array()) throw std::invalid_argument("expected a JSON array");
  std::vector<BenchRecord> records;
  records.reserve(arr.size());
  for (const auto& j : arr) records.push_back(record_from_json(j));
  return records;
}

void write_aggregate_csv(std::span<const AggregateRow> rows, std::ostream& out) {
  out << "n,inverse_n,d,solver,count,failed,mean_gamma,stderr_gamma,"
         "mean_figure_of_merit,stderr_figure_of_merit,fom_over_reference\n";
  for (const AggregateRow& row : rows) {
    out << row.n << ',' << format_number(row.inverse_n) << ',' << row.d << ','
        << solver_name(row.solver) << ',' << row.count << ',' << row.failed
        << ',' << format_number(row.mean_gamma) << ','
        << opt_field(row.stderr_gamma) << ','
        << opt_field(row.mean_figure_of_merit) << ','
        << opt_field(row.stderr_figure_of_merit) << ','
        << opt_field(row.fom_over_reference) << '\n';
  }
}

ExperimentSpec parse_experiment_config(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;

  auto split_list = [](const std::vector<std::string>& toks) {
    std::vector<std::string> items;
    for (const std::string& t : toks) {
      std::string cur;
      for (char c : t) {
        if (c == ',') {
          if (!cur.empty()) items.push_back(std::move(cur));
          cur.clear();
        } else {
          cur += c;
        }
      }
      if (!cur.empty()) items.push_back(std::move(cur));
    }
    return items;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::vector<std::string> values;
    std::string tok;
    while (ss >> tok) values.push_back(tok);
    if (values.empty())
      throw ParseError(line_no, "key '" + key + "' has no value");

    auto one = [&]() -> const std::string& {
      if (values.size() != 1)
        throw ParseError(line_no, "key '" + key + "' expects one value");
      return values.front();
    };

    try {
      if (key == "d") spec.d = to_integer<Index>(one());
      else if (key == "sizes") {
        spec.sizes.clear();
        for (const std::string& s : split_list(values))
          spec.sizes.push_back(to_integer<Index>(s));
      } else if (key == "samples") spec.samples_per_size = to_integer<int>(one());
      else if (key == "solvers") {
        spec.solvers.clear();
        for (const std::string& s : split_list(values)) {
          const auto id = solver_from_name(s);
          if (!id) throw std::invalid_argument("unknown solver '" + s + "'");
          spec.solvers.push_back(*id);
        }
      } else if (key == "base_seed") spec.base_seed.value = to_integer<std::uint64_t>(one());
      else if (key == "workers") spec.workers = to_integer<int>(one());
      else if (key == "embedding_dim") spec.train.embedding_dim = to_integer<Index>(one());
      else if (key == "hidden_dim") spec.train.hidden_dim = to_integer<Index>(one());
      else if (key == "learning_rate") spec.train.learning_rate = to_scalar(one());
      else if (key == "max_epochs") spec.train.max_epochs = to_integer<Index>(one());
      else if (key == "patience") spec.train.patience = to_integer<Index>(one());
      else if (key == "tolerance") spec.train.tolerance = to_scalar(one());
      else if (key == "rounding_threshold") spec.train.rounding_threshold = to_scalar(one());
      else if (key == "restarts") spec.train.restarts = to_integer<int>(one());
      else if (key == "adam_beta1") spec.train.adam_beta1 = to_scalar(one());
      else if (key == "adam_beta2") spec.train.adam_beta2 = to_scalar(one());
      else if (key == "adam_eps") spec.train.adam_eps = to_scalar(one());
      else if (key == "eo_tau") spec.eo.tau = to_scalar(one());
      else if (key == "eo_steps") spec.eo.steps = to_integer<Index>(one());
      else if (key == "optimality_reference") spec.optimality_reference = to_scalar(one());
      else throw ParseError(line_no, "unknown key '" + key + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return spec;
}

}  // namespace maxcut
