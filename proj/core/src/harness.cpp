#include "longtail/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "longtail/errors.hpp"
#include "longtail/seeding.hpp"
#include "longtail/statistics.hpp"

namespace longtail {

namespace {

constexpr StatisticId kAllStatistics[] = {
    StatisticId::HeavyDetCount,  StatisticId::HeavyDetHill,        StatisticId::HeavyRandHill,
    StatisticId::LightDetCount,  StatisticId::LightDetHill,        StatisticId::LightRandHill,
    StatisticId::PartialSum,     StatisticId::PartialSumTruncated, StatisticId::ReductionCount,
    StatisticId::ReductionHill,
};

bool is_partial_sum(StatisticId id) {
  return id == StatisticId::PartialSum || id == StatisticId::PartialSumTruncated;
}

bool is_reduction(StatisticId id) {
  return id == StatisticId::ReductionCount || id == StatisticId::ReductionHill;
}

double innovation_constant(const InnovationSpec& inn) {
  return inn.alpha() < 2.0 ? inn.tail_constant() : inn.variance();
}

TheoryReport theory_for(const ProcessSpec& p) {
  return make_theory_report(p.alpha(), p.d, p.c_a, innovation_constant(p.innovation));
}

double partial_sum_rate(const ProcessSpec& p, std::size_t n) {
  return std::pow(static_cast<double>(n), p.d + 1.0 / p.alpha());
}

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

// Everything replications at one n share; read-only once built.
struct GridPoint {
  std::size_t n = 0;
  ProcessSpec process;
  std::unique_ptr<PathSimulator> simulator;
  std::unique_ptr<PartialSumSampler> partial_sums;
  std::optional<TheoryReport> theory;
  std::optional<MarginalLaw> marginal;
  std::optional<ThresholdSchedule> schedule;
  std::optional<StatisticContext> det_context;
  std::optional<StatisticContext> rand_context;
  std::string det_error;
  std::string rand_error;
  double nu = 0.0;
};

GridPoint prepare(const ExperimentConfig& cfg, std::size_t n) {
  GridPoint g;
  g.n = n;
  g.process = cfg.process_at(n);
  g.nu = moment_index(g.process.innovation);

  bool need_path = false;
  bool need_pot = false;
  bool need_det = false;
  bool need_rand = false;
  bool need_sums = false;
  for (auto id : cfg.statistics) {
    if (is_partial_sum(id)) {
      need_sums = true;
      continue;
    }
    need_path = need_pot = true;
    const auto cor = as_corollary(id);
    if (cor && uses_random_threshold(*cor)) {
      need_rand = true;
    } else {
      need_det = true;
    }
  }
  if (need_path) g.simulator = std::make_unique<PathSimulator>(g.process, n, cfg.kernel);
  if (need_sums) g.partial_sums = std::make_unique<PartialSumSampler>(g.process, n, cfg.kernel);
  if (need_pot) {
    g.theory = theory_for(g.process);
    g.marginal = marginal_law(g.process, cfg.marginal_mc_size, substream(replication_seed(cfg.base_seed, n, 0), 7));
    g.schedule = make_schedule(cfg.schedule_kind, *g.theory, g.nu, cfg.schedule);
    auto build = [&](bool random, std::optional<StatisticContext>& slot, std::string& err) {
      try {
        slot = make_statistic_context(*g.theory, *g.schedule, *g.marginal, g.nu, n, random);
      } catch (const std::exception& e) {
        err = e.what();
      }
    };
    if (need_det) build(false, g.det_context, g.det_error);
    if (need_rand) build(true, g.rand_context, g.rand_error);
  }
  return g;
}

// Pointers inside the contexts refer to the GridPoint's own members, so the
// point must not move after prepare(); it is heap-allocated by the caller.
void rebind(GridPoint& g) {
  for (auto* ctx : {&g.det_context, &g.rand_context}) {
    if (!*ctx) continue;
    (*ctx)->theory = &*g.theory;
    (*ctx)->schedule = &*g.schedule;
    (*ctx)->marginal = &*g.marginal;
  }
}

ReplicationRow run_cell(const GridPoint& g, StatisticId id, std::size_t rep, const std::vector<double>* path, const PartialSumSampler::Draw* sums) {
  ReplicationRow row;
  row.statistic = id;
  row.n = g.n;
  row.rep = rep;
  try {
    if (is_partial_sum(id)) {
      row.raw = id == StatisticId::PartialSum ? sums->untruncated : sums->truncated;
      row.value = row.raw / partial_sum_rate(g.process, g.n);
      return row;
    }
    const auto cor = as_corollary(id);
    const bool random = cor && uses_random_threshold(*cor);
    const auto& ctx = random ? g.rand_context : g.det_context;
    if (!ctx) {
      row.status = "error: " + sanitize(random ? g.rand_error : g.det_error);
      return row;
    }
    if (is_reduction(id)) {
      const auto kind = id == StatisticId::ReductionCount ? FunctionalKind::Count : FunctionalKind::Hill;
      const double slope = kind == FunctionalKind::Count ? ctx->centering.density : ctx->centering.slope_G;
      row.raw = reduction_residual(*path, ctx->centering, ctx->u, kind);
      row.value = row.raw / (partial_sum_rate(g.process, g.n) * slope);
      row.u_or_k = ctx->u;
      return row;
    }
    const auto stat = normalized_statistic(*cor, *path, *ctx);
    row.raw = stat.raw_value;
    row.value = stat.centered_scaled_value;
    row.u_or_k = stat.u_or_k;
    if (!stat.exceedance) row.status = "no_exceedance";
  } catch (const std::exception& e) {
    row.status = "error: " + sanitize(e.what());
  }
  return row;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  if (s == "nan" || s == "-nan") return std::nan("");
  throw ConfigError("malformed numeric CSV cell '" + s + "'");
}

}  // namespace

std::string_view to_string(StatisticId id) {
  if (auto cor = as_corollary(id)) return to_string(*cor);
  switch (id) {
    case StatisticId::PartialSum:
      return "PartialSum";
    case StatisticId::PartialSumTruncated:
      return "PartialSumTruncated";
    case StatisticId::ReductionCount:
      return "ReductionCount";
    case StatisticId::ReductionHill:
      return "ReductionHill";
    default:
      return "unknown";
  }
}

StatisticId statistic_from_string(std::string_view name) {
  for (auto id : kAllStatistics) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("unknown statistic '" + std::string(name) + "'");
}

std::optional<CorollaryId> as_corollary(StatisticId id) {
  switch (id) {
    case StatisticId::HeavyDetCount:
      return CorollaryId::HeavyDetCount;
    case StatisticId::HeavyDetHill:
      return CorollaryId::HeavyDetHill;
    case StatisticId::HeavyRandHill:
      return CorollaryId::HeavyRandHill;
    case StatisticId::LightDetCount:
      return CorollaryId::LightDetCount;
    case StatisticId::LightDetHill:
      return CorollaryId::LightDetHill;
    case StatisticId::LightRandHill:
      return CorollaryId::LightRandHill;
    default:
      return std::nullopt;
  }
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 2) throw ConfigError("every n must be at least 2");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly ascending");
  }
  if (replications < 2) throw ConfigError("replications must be at least 2");
  if (statistics.empty()) throw ConfigError("at least one statistic is required");
  try {
    process_at(n_grid.front()).validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid process: ") + e.what());
  }
}

ProcessSpec ExperimentConfig::process_at(std::size_t n) const {
  ProcessSpec p = process;
  if (horizon_per_n > 0) p.horizon = horizon_per_n * n;
  return p;
}

ProcessSpec process_from_config(const Config& c) {
  ProcessSpec p;
  try {
    const auto family = family_from_string(c.get_string("innovation.family", "gaussian"));
    const double scale = c.get_double("innovation.scale", 1.0);
    switch (family) {
      case Family::Gaussian:
        p.innovation = InnovationSpec::gaussian(scale);
        break;
      case Family::SymmetricStable:
        p.innovation = InnovationSpec::symmetric_stable(c.get_double("innovation.tail_index"), scale);
        break;
      case Family::StudentT:
        p.innovation = InnovationSpec::student_t(c.get_double("innovation.tail_index"), scale);
        break;
    }
    p.d = c.get_double("process.d");
    p.c_a = c.get_double("process.c_a", 1.0);
    if (c.has("process.horizon")) {
      p.horizon = c.get_u64("process.horizon");
    } else {
      p.horizon = truncation_horizon(p.d, p.alpha(), c.get_double("process.rel_tol", 1e-3),
                                     c.get_u64("process.max_horizon", std::uint64_t{1} << 24));
    }
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

ExperimentConfig experiment_from_config(const Config& c) {
  ExperimentConfig cfg;
  const bool per_n = c.has("process.horizon_per_n");
  if (per_n) {
    Config copy = c;
    cfg.horizon_per_n = c.get_u64("process.horizon_per_n");
    if (cfg.horizon_per_n == 0) throw ConfigError("process.horizon_per_n must be positive");
    if (!copy.has("process.horizon")) copy.set("process.horizon", "1");
    cfg.process = process_from_config(copy);
  } else {
    cfg.process = process_from_config(c);
  }

  cfg.statistics.clear();
  const std::string key = c.has("experiment.statistics") ? "experiment.statistics" : "experiment.corollary";
  for (const auto& name : c.get_list(key)) cfg.statistics.push_back(statistic_from_string(name));

  cfg.schedule_kind = schedule_kind_from_string(c.get_string("schedule.kind", "HeavyPower"));
  cfg.schedule.delta = c.get_optional_double("schedule.delta");
  cfg.schedule.theta = c.get_optional_double("schedule.theta");
  cfg.schedule.prefactor = c.get_double("schedule.prefactor", 1.0);
  cfg.schedule.beta = c.get_double("schedule.beta", 2.0);
  cfg.schedule.random_base = schedule_kind_from_string(c.get_string("schedule.random_base", "HeavyPower"));

  for (auto n : c.get_u64_list("experiment.n_grid")) cfg.n_grid.push_back(static_cast<std::size_t>(n));
  cfg.replications = c.get_u64("experiment.replications");
  cfg.base_seed = c.get_u64("experiment.seed", 1);
  if (const char* env = std::getenv("LONGTAIL_SEED")) {
    Config seed;
    seed.set("LONGTAIL_SEED", env);
    cfg.base_seed = seed.get_u64("LONGTAIL_SEED");
  }
  const std::string kernel = c.get_string("experiment.kernel", "fft");
  if (kernel == "fft") {
    cfg.kernel = Kernel::Fft;
  } else if (kernel == "direct") {
    cfg.kernel = Kernel::Direct;
  } else {
    throw ConfigError("experiment.kernel must be fft or direct");
  }
  cfg.marginal_mc_size = c.get_u64("experiment.marginal_mc_size", 200000);
  cfg.output_path = c.get_string("experiment.output", "");

  // Random-threshold statistics need RandomK; deterministic ones use the base rule.
  for (auto id : cfg.statistics) {
    const auto cor = as_corollary(id);
    if (cor && uses_random_threshold(*cor) && cfg.schedule_kind != ScheduleKind::RandomK) {
      throw ConfigError(std::string(to_string(id)) + " needs schedule.kind = RandomK");
    }
  }
  cfg.validate();
  return cfg;
}

ReplicationTable run_experiment(const ExperimentConfig& config, std::size_t workers) {
  config.validate();
  workers = std::max<std::size_t>(workers, 1);
  const std::size_t R = config.replications;
  const std::size_t S = config.statistics.size();

  ReplicationTable table;
  table.rows.reserve(config.n_grid.size() * R * S);
  for (const auto n : config.n_grid) {
    std::unique_ptr<GridPoint> point;
    try {
      point = std::make_unique<GridPoint>(prepare(config, n));
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("n = ") + std::to_string(n) + ": " + e.what());
    }
    rebind(*point);
    const GridPoint& g = *point;

    std::vector<ReplicationRow> cells(R * S);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t rep = next++; rep < R; rep = next++) {
        const auto seed = replication_seed(config.base_seed, n, rep);
        std::vector<double> path;
        PartialSumSampler::Draw sums;
        std::string failure;
        try {
          if (g.simulator) path = g.simulator->simulate(seed);
          if (g.partial_sums) sums = g.partial_sums->sample(seed);
        } catch (const std::exception& e) {
          failure = "error: " + sanitize(e.what());
        }
        for (std::size_t s = 0; s < S; ++s) {
          auto& cell = cells[s * R + rep];
          if (!failure.empty()) {
            cell.statistic = config.statistics[s];
            cell.n = n;
            cell.rep = rep;
            cell.status = failure;
            continue;
          }
          cell = run_cell(g, config.statistics[s], rep, &path, &sums);
        }
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    std::move(cells.begin(), cells.end(), std::back_inserter(table.rows));
  }
  table.aggregates = aggregate_rows(config, table.rows);
  return table;
}

std::optional<StableLaw> predicted_limit(const ExperimentConfig& config, StatisticId id, std::size_t n) {
  const ProcessSpec p = config.process_at(n);
  if (is_reduction(id)) return std::nullopt;
  if (id == StatisticId::PartialSumTruncated) {
    const auto law = partial_sum_law(p, n, PastCompletion::Truncated);
    const auto exact = law.stable_law();
    return StableLaw(exact.alpha(), exact.eta() / partial_sum_rate(p, n));
  }
  const auto theory = theory_for(p);
  const auto limit = theory.limit_law();
  if (id == StatisticId::PartialSum) return limit;
  const auto cor = *as_corollary(id);
  const double scale = predicted_limit_scale(cor, moment_index(p.innovation));
  if (!(scale > 0.0)) return std::nullopt;
  return StableLaw(limit.alpha(), limit.eta() * scale);
}

std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& config, const std::vector<ReplicationRow>& rows) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> groups;  // (statistic slot, n)
  auto slot_of = [&](StatisticId id) {
    const auto it = std::find(config.statistics.begin(), config.statistics.end(), id);
    if (it == config.statistics.end()) throw ConfigError("row statistic not part of the experiment");
    return static_cast<std::size_t>(it - config.statistics.begin());
  };
  for (const auto& s : config.statistics) {
    for (const auto n : config.n_grid) groups[{slot_of(s), n}];
  }
  for (const auto& row : rows) {
    auto& values = groups[{slot_of(row.statistic), row.n}];
    if (row.ok() && std::isfinite(row.value)) values.push_back(row.value);
  }

  const double alpha = config.process.alpha();
  const double reference_mad = sas_quantile(StableLaw(alpha, 1.0), 0.75);
  const double r = optimal_exponents(alpha, config.process.d).r0;

  std::vector<AggregateRow> out;
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());  // makes every reduction order-free
    AggregateRow agg;
    agg.statistic = config.statistics[key.first];
    agg.n = key.second;
    agg.count_ok = values.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    agg.ks = nan;
    agg.empirical_scale = nan;
    agg.lr_norm = nan;
    if (!values.empty()) {
      agg.empirical_scale = calibrated_scale(values, reference_mad);
      agg.lr_norm = lr_norm_estimate(values, r);
      if (const auto law = predicted_limit(config, agg.statistic, agg.n)) {
        agg.ks = ks_distance(values, [&](double x) { return sas_cdf(*law, x); });
      }
    }
    out.push_back(agg);
  }
  return out;
}

void write_rows_csv(std::ostream& out, const std::vector<ReplicationRow>& rows) {
  out << "corollary_id,n,rep,raw,centered_scaled,u_or_k,status\n";
  for (const auto& r : rows) {
    out << to_string(r.statistic) << ',' << r.n << ',' << r.rep << ',' << format_double(r.raw) << ','
        << format_double(r.value) << ',' << format_double(r.u_or_k) << ',' << r.status << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "n,ks,empirical_scale,lr_norm,count_ok\n";
  for (const auto& a : rows) {
    out << a.n << ',' << format_double(a.ks) << ',' << format_double(a.empirical_scale) << ','
        << format_double(a.lr_norm) << ',' << a.count_ok << '\n';
  }
}

std::vector<ReplicationRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "corollary_id,n,rep,raw,centered_scaled,u_or_k,status") {
    throw ConfigError("unexpected replication CSV header");
  }
  std::vector<ReplicationRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7) throw ConfigError("replication CSV row needs 7 columns: " + line);
    ReplicationRow r;
    r.statistic = statistic_from_string(cells[0]);
    r.n = static_cast<std::size_t>(std::stoull(cells[1]));
    r.rep = static_cast<std::size_t>(std::stoull(cells[2]));
    r.raw = parse_cell(cells[3]);
    r.value = parse_cell(cells[4]);
    r.u_or_k = parse_cell(cells[5]);
    r.status = cells[6];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_experiment(const std::string& dir, const ReplicationTable& table) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "replications.csv");
    if (!out) throw ConfigError("cannot write to '" + dir + "'");
    write_rows_csv(out, table.rows);
  }
  std::vector<StatisticId> ids;
  for (const auto& a : table.aggregates) {
    if (std::find(ids.begin(), ids.end(), a.statistic) == ids.end()) ids.push_back(a.statistic);
  }
  for (const auto id : ids) {
    std::vector<AggregateRow> subset;
    for (const auto& a : table.aggregates) {
      if (a.statistic == id) subset.push_back(a);
    }
    const std::string name =
        ids.size() == 1 ? std::string("aggregate.csv") : "aggregate_" + std::string(to_string(id)) + ".csv";
    std::ofstream out(fs::path(dir) / name);
    write_aggregate_csv(out, subset);
  }
}

void write_path_csv(std::ostream& out, const std::vector<double>& path) {
  out << "x\n";
  for (double x : path) out << format_double(x) << '\n';
}

std::vector<double> read_samples(std::istream& in) {
  std::vector<double> xs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cell = line.substr(0, line.find(','));
    if (first) {
      first = false;
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used == cell.size()) {
          xs.push_back(v);
          continue;
        }
      } catch (const std::exception&) {
      }
      continue;  // header row
    }
    xs.push_back(parse_cell(cell));
  }
  return xs;
}

}  // namespace longtail
