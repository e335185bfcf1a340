#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "longtail/config.hpp"
#include "longtail/limit_theory.hpp"
#include "longtail/linear_process.hpp"
#include "longtail/pot.hpp"

namespace longtail {

/// Per-replication quantity an experiment records. The first six are the
/// PoT corollary statistics; the rest drive the partial-sum and reduction
/// checks.
enum class StatisticId {
  HeavyDetCount,
  HeavyDetHill,
  HeavyRandHill,
  LightDetCount,
  LightDetHill,
  LightRandHill,
  PartialSum,           // n^{-d-1/alpha} sum X_t with the remote past completed
  PartialSumTruncated,  // same, truncated kernel only
  ReductionCount,       // residual / (n^{d+1/alpha} G'(0)), G = 1{x > u}
  ReductionHill,        // same for G = log(x/u)_+
};

std::string_view to_string(StatisticId id);
StatisticId statistic_from_string(std::string_view name);
std::optional<CorollaryId> as_corollary(StatisticId id);

struct ExperimentConfig {
  ProcessSpec process;
  /// When nonzero, J = horizon_per_n * n for each grid point.
  std::size_t horizon_per_n = 0;
  std::vector<StatisticId> statistics{StatisticId::HeavyDetCount};
  ScheduleKind schedule_kind = ScheduleKind::HeavyPower;
  ScheduleOptions schedule;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 2;
  std::uint64_t base_seed = 1;
  Kernel kernel = Kernel::Fft;
  std::size_t marginal_mc_size = 200000;
  std::string output_path;

  /// n_grid strictly ascending and nonempty, R >= 2, process constraints.
  void validate() const;
  ProcessSpec process_at(std::size_t n) const;
};

/// Builds an experiment from dotted keys (see README for the key list).
/// The LONGTAIL_SEED environment variable, when set, overrides base_seed.
ExperimentConfig experiment_from_config(const Config& config);
ProcessSpec process_from_config(const Config& config);

struct ReplicationRow {
  StatisticId statistic = StatisticId::HeavyDetCount;
  std::size_t n = 0;
  std::size_t rep = 0;
  double raw = 0.0;
  double value = 0.0;
  double u_or_k = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct AggregateRow {
  StatisticId statistic = StatisticId::HeavyDetCount;
  std::size_t n = 0;
  double ks = 0.0;
  double empirical_scale = 0.0;
  double lr_norm = 0.0;
  std::size_t count_ok = 0;
};

struct ReplicationTable {
  std::vector<ReplicationRow> rows;
  std::vector<AggregateRow> aggregates;
};

/// Runs every (n, replication) cell; replication (n, i) uses
/// replication_seed(base_seed, n, i), so results do not depend on the
/// number of workers or their scheduling. Failed cells are kept with a
/// status other than "ok".
ReplicationTable run_experiment(const ExperimentConfig& config, std::size_t workers = 1);

/// Limit law each statistic is compared against at sample size n; nullopt
/// when the limit is degenerate.
std::optional<StableLaw> predicted_limit(const ExperimentConfig& config, StatisticId id, std::size_t n);

/// Recomputes the aggregate block from rows (order-insensitive).
std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& config,
                                         const std::vector<ReplicationRow>& rows);

/// corollary_id,n,rep,raw,centered_scaled,u_or_k,status
void write_rows_csv(std::ostream& out, const std::vector<ReplicationRow>& rows);
/// n,ks,empirical_scale,lr_norm,count_ok (rows for one statistic)
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<ReplicationRow> read_rows_csv(std::istream& in);

/// Writes replications.csv and aggregate.csv (aggregate_<id>.csv per
/// statistic when several are recorded) into `dir`.
void write_experiment(const std::string& dir, const ReplicationTable& table);

/// Single-column CSV with header `x`.
void write_path_csv(std::ostream& out, const std::vector<double>& path);
std::vector<double> read_samples(std::istream& in);

}  // namespace longtail
