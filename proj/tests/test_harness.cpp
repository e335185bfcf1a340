#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "longtail/errors.hpp"
#include "longtail/harness.hpp"
#include "longtail/seeding.hpp"

using namespace longtail;

namespace {

ExperimentConfig small_stable(std::vector<StatisticId> stats) {
  ExperimentConfig cfg;
  cfg.process.d = 0.1;
  cfg.process.innovation = InnovationSpec::symmetric_stable(1.5);
  cfg.horizon_per_n = 2;
  cfg.statistics = std::move(stats);
  cfg.schedule_kind = ScheduleKind::RandomK;
  cfg.schedule.prefactor = 3.0;
  cfg.n_grid = {64, 128};
  cfg.replications = 12;
  cfg.base_seed = 2718;
  return cfg;
}

std::string rows_csv(const ReplicationTable& t) {
  std::ostringstream out;
  write_rows_csv(out, t.rows);
  return out.str();
}

std::string aggregate_csv(const ReplicationTable& t) {
  std::ostringstream out;
  write_aggregate_csv(out, t.aggregates);
  return out.str();
}

const std::vector<StatisticId> kMixed{StatisticId::HeavyDetCount, StatisticId::HeavyRandHill,
                                      StatisticId::PartialSum, StatisticId::PartialSumTruncated,
                                      StatisticId::ReductionHill};

}  // namespace

TEST_CASE("statistic names round trip") {
  for (auto name : {"HeavyDetCount", "LightRandHill", "PartialSum", "PartialSumTruncated", "ReductionCount",
                    "ReductionHill"}) {
    CHECK(to_string(statistic_from_string(name)) == name);
  }
  CHECK_FALSE(as_corollary(StatisticId::PartialSum));
  CHECK(as_corollary(StatisticId::HeavyDetHill) == CorollaryId::HeavyDetHill);
}

TEST_CASE("rows are ordered and complete") {
  const auto cfg = small_stable(kMixed);
  const auto t = run_experiment(cfg);
  REQUIRE(t.rows.size() == cfg.n_grid.size() * cfg.replications * kMixed.size());
  std::size_t i = 0;
  for (auto n : cfg.n_grid) {
    for (auto id : kMixed) {
      for (std::size_t r = 0; r < cfg.replications; ++r, ++i) {
        CHECK(t.rows[i].n == n);
        CHECK(t.rows[i].statistic == id);
        CHECK(t.rows[i].rep == r);
      }
    }
  }
  CHECK(t.aggregates.size() == cfg.n_grid.size() * kMixed.size());
}

TEST_CASE("reruns are byte identical") {
  auto cfg = small_stable(kMixed);
  cfg.n_grid = {16};
  cfg.replications = 2;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(rows_csv(a) == rows_csv(b));
  CHECK(aggregate_csv(a) == aggregate_csv(b));
  cfg.base_seed += 1;
  CHECK(rows_csv(run_experiment(cfg)) != rows_csv(a));
}

TEST_CASE("worker count does not change results") {
  const auto cfg = small_stable(kMixed);
  const auto one = run_experiment(cfg, 1);
  const auto eight = run_experiment(cfg, 8);
  CHECK(rows_csv(one) == rows_csv(eight));
  CHECK(aggregate_csv(one) == aggregate_csv(eight));
}

TEST_CASE("cells use the documented seeds") {
  auto cfg = small_stable({StatisticId::PartialSumTruncated});
  cfg.n_grid = {32};
  cfg.replications = 3;
  const auto t = run_experiment(cfg);
  const auto p = cfg.process_at(32);
  const PartialSumSampler sampler(p, 32, cfg.kernel);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(t.rows[r].raw == sampler.sample(replication_seed(cfg.base_seed, 32, r)).truncated);
    CHECK(t.rows[r].value == doctest::Approx(t.rows[r].raw / std::pow(32.0, 0.1 + 1.0 / 1.5)).epsilon(1e-15));
  }
}

TEST_CASE("aggregates are recomputable from the rows") {
  const auto cfg = small_stable(kMixed);
  const auto t = run_experiment(cfg);
  auto shuffled = t.rows;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto again = aggregate_rows(cfg, shuffled);
  REQUIRE(again.size() == t.aggregates.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].statistic == t.aggregates[i].statistic);
    CHECK(again[i].n == t.aggregates[i].n);
    CHECK(std::memcmp(&again[i].ks, &t.aggregates[i].ks, sizeof(double)) == 0);
    CHECK(std::memcmp(&again[i].empirical_scale, &t.aggregates[i].empirical_scale, sizeof(double)) == 0);
    CHECK(std::memcmp(&again[i].lr_norm, &t.aggregates[i].lr_norm, sizeof(double)) == 0);
    CHECK(again[i].count_ok == t.aggregates[i].count_ok);
  }
  // reduction statistics have no limit law to compare against
  for (const auto& a : t.aggregates) {
    if (a.statistic == StatisticId::ReductionHill) CHECK(std::isnan(a.ks));
    if (a.statistic == StatisticId::PartialSum) CHECK(a.ks >= 0.0);
  }
}

TEST_CASE("CSV round trip") {
  const auto cfg = small_stable(kMixed);
  const auto t = run_experiment(cfg);
  std::istringstream in(rows_csv(t));
  const auto back = read_rows_csv(in);
  REQUIRE(back.size() == t.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].statistic == t.rows[i].statistic);
    CHECK(back[i].value == t.rows[i].value);
    CHECK(back[i].raw == t.rows[i].raw);
    CHECK(back[i].status == t.rows[i].status);
  }
  std::istringstream bad("n,rep\n1,2\n");
  CHECK_THROWS_AS(read_rows_csv(bad), ConfigError);

  std::ostringstream path_out;
  write_path_csv(path_out, {1.5, -0.25, 1e-300});
  CHECK(path_out.str() == "x\n1.5\n-0.25\n1e-300\n");
  std::istringstream path_in(path_out.str());
  CHECK(read_samples(path_in) == std::vector<double>{1.5, -0.25, 1e-300});
  std::istringstream headless("3\n4\n");
  CHECK(read_samples(headless) == std::vector<double>{3.0, 4.0});
}

TEST_CASE("write_experiment lays out the files") {
  const auto dir = std::filesystem::temp_directory_path() / "longtail_harness_test";
  std::filesystem::remove_all(dir);
  auto cfg = small_stable({StatisticId::PartialSum});
  cfg.n_grid = {16, 32};
  write_experiment(dir.string(), run_experiment(cfg));
  CHECK(std::filesystem::exists(dir / "replications.csv"));
  CHECK(std::filesystem::exists(dir / "aggregate.csv"));
  std::filesystem::remove_all(dir);
  write_experiment(dir.string(), run_experiment(small_stable(kMixed)));
  CHECK(std::filesystem::exists(dir / "aggregate_PartialSum.csv"));
  CHECK(std::filesystem::exists(dir / "aggregate_HeavyRandHill.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("failures are recorded per cell") {
  // A threshold far above every realistic value: Hill sums see no exceedance.
  auto cfg = small_stable({StatisticId::HeavyDetHill});
  cfg.schedule_kind = ScheduleKind::HeavyPower;
  cfg.schedule.prefactor = 1e12;
  const auto t = run_experiment(cfg);
  std::size_t none = 0;
  for (const auto& r : t.rows) none += r.status == "no_exceedance" ? 1 : 0;
  CHECK(none > 0);

  // Random threshold with k = floor(n P) = 0 cannot be formed: every cell errors.
  auto rk = small_stable({StatisticId::HeavyRandHill});
  rk.schedule.prefactor = 1e12;
  const auto e = run_experiment(rk);
  for (const auto& r : e.rows) {
    CHECK(r.status.rfind("error: ", 0) == 0);
    CHECK(r.status.find(',') == std::string::npos);
  }
  for (const auto& a : e.aggregates) CHECK(a.count_ok == 0);
}

TEST_CASE("predicted limits") {
  auto cfg = small_stable(kMixed);
  const auto ps = predicted_limit(cfg, StatisticId::PartialSum, 1024);
  REQUIRE(ps);
  CHECK(ps->alpha() == 1.5);
  CHECK(ps->eta() == doctest::Approx(9.99698949958213596).epsilon(1e-10));
  const auto cnt = predicted_limit(cfg, StatisticId::HeavyDetCount, 1024);
  CHECK(cnt->eta() == doctest::Approx(1.5 * ps->eta()));
  const auto rh = predicted_limit(cfg, StatisticId::HeavyRandHill, 1024);
  CHECK(rh->eta() == doctest::Approx(0.6 * ps->eta()));
  CHECK_FALSE(predicted_limit(cfg, StatisticId::ReductionCount, 1024));
  const auto tr = predicted_limit(cfg, StatisticId::PartialSumTruncated, 1024);
  CHECK(tr->eta() < ps->eta());

  ExperimentConfig g;
  g.process.d = 0.25;
  g.process.innovation = InnovationSpec::gaussian();
  g.process.horizon = 64;
  g.statistics = {StatisticId::LightRandHill};
  g.n_grid = {64};
  CHECK_FALSE(predicted_limit(g, StatisticId::LightRandHill, 64));
  const auto gl = predicted_limit(g, StatisticId::LightDetCount, 64);
  CHECK(gl->alpha() == 2.0);
  CHECK(2.0 * gl->eta() * gl->eta() == doctest::Approx(13.9843069562246390));
}
