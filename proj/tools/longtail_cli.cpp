// longtail: command-line front end for the theory, simulation and
// experiment routines.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "longtail/config.hpp"
#include "longtail/errors.hpp"
#include "longtail/harness.hpp"
#include "longtail/limit_theory.hpp"
#include "longtail/linear_process.hpp"
#include "longtail/stable.hpp"
#include "longtail/statistics.hpp"

namespace lt = longtail;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw lt::ConfigError("bad " + what + ": '" + s + "'");
}

// stable:ALPHA:ETA or normal:SIGMA2
lt::StableLaw parse_limit(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "stable") {
    return lt::StableLaw(to_number(parts[1], "stable index"), to_number(parts[2], "stable scale"));
  }
  if (parts.size() == 2 && parts[0] == "normal") {
    const double s2 = to_number(parts[1], "variance");
    if (!(s2 > 0.0)) throw lt::ConfigError("variance must be positive");
    return lt::StableLaw(2.0, std::sqrt(s2 / 2.0));
  }
  throw lt::ConfigError("--limit expects stable:ALPHA:ETA or normal:SIGMA2, got '" + spec + "'");
}

int cmd_theory(double alpha, double d, std::optional<double> c_a, std::optional<double> constant) {
  if (c_a.has_value() != constant.has_value()) {
    throw lt::ConfigError("--ca and --A-const must be given together");
  }
  try {
    std::cout << lt::serialize(lt::make_theory_report(alpha, d, c_a, constant));
  } catch (const lt::InvalidArgument& e) {
    throw lt::ConfigError(e.what());
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> n_opt,
                 std::optional<std::uint64_t> seed_opt) {
  const auto cfg = lt::Config::load(config_path);
  const auto spec = lt::process_from_config(cfg);
  const auto n = n_opt.value_or(cfg.get_u64("simulate.n"));
  if (n == 0) throw lt::ConfigError("simulate.n must be positive");
  std::uint64_t seed = seed_opt.value_or(cfg.get_u64("simulate.seed", 1));
  if (const char* env = std::getenv("LONGTAIL_SEED"); env && !seed_opt) {
    lt::Config e;
    e.set("seed", env);
    seed = e.get_u64("seed");
  }
  const std::string kernel = cfg.get_string("simulate.kernel", "fft");
  if (kernel != "fft" && kernel != "direct") throw lt::ConfigError("simulate.kernel must be fft or direct");
  const auto path = lt::simulate_path(spec, n, seed, kernel == "fft" ? lt::Kernel::Fft : lt::Kernel::Direct);
  if (out_path == "-") {
    lt::write_path_csv(std::cout, path);
  } else {
    std::ofstream out(out_path);
    if (!out) throw lt::ConfigError("cannot write '" + out_path + "'");
    lt::write_path_csv(out, path);
  }
  return 0;
}

int cmd_experiment(const std::string& config_path, std::string out_dir, std::size_t workers) {
  const auto cfg = lt::experiment_from_config(lt::Config::load(config_path));
  if (out_dir.empty()) out_dir = cfg.output_path;
  if (out_dir.empty()) throw lt::ConfigError("no output directory: pass --out or set experiment.output");
  const auto table = lt::run_experiment(cfg, workers);
  lt::write_experiment(out_dir, table);
  std::cout << "statistic,n,ks,empirical_scale,lr_norm,count_ok\n";
  for (const auto& a : table.aggregates) {
    std::cout << lt::to_string(a.statistic) << ',' << a.n << ',' << lt::format_double(a.ks) << ','
              << lt::format_double(a.empirical_scale) << ',' << lt::format_double(a.lr_norm) << ','
              << a.count_ok << '\n';
  }
  return 0;
}

int cmd_kscheck(const std::string& samples_path, const std::string& limit_spec) {
  const auto law = parse_limit(limit_spec);
  std::ifstream in(samples_path);
  if (!in) throw lt::ConfigError("cannot open '" + samples_path + "'");
  const auto xs = lt::read_samples(in);
  if (xs.empty()) throw lt::ConfigError("no samples in '" + samples_path + "'");
  const double ks = lt::ks_distance(xs, [&](double x) { return lt::sas_cdf(law, x); });
  std::cout << "m=" << xs.size() << "\nks=" << lt::format_double(ks) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-memory linear processes: limit theory, simulation and peaks-over-threshold experiments"};
  app.require_subcommand(1);

  double alpha = 0.0;
  double d = 0.0;
  std::optional<double> c_a;
  std::optional<double> a_const;
  auto* theory = app.add_subcommand("theory", "print the limit-theory report for (alpha, d)");
  theory->add_option("--alpha", alpha, "stability index in (1, 2]")->required();
  theory->add_option("--d", d, "memory parameter")->required();
  theory->add_option("--ca", c_a, "coefficient constant c_a");
  theory->add_option("--A-const", a_const, "innovation tail constant A (alpha < 2) or variance (alpha = 2)");

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> n_opt;
  std::optional<std::uint64_t> seed_opt;
  auto* simulate = app.add_subcommand("simulate", "write one simulated path as CSV");
  simulate->add_option("--config", config_path, "configuration file")->required();
  simulate->add_option("--out", out_path, "output CSV ('-' for stdout)")->required();
  simulate->add_option("--n", n_opt, "path length (overrides simulate.n)");
  simulate->add_option("--seed", seed_opt, "seed (overrides simulate.seed and LONGTAIL_SEED)");

  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  auto* experiment = app.add_subcommand("experiment", "run a replication grid");
  experiment->add_option("--config", config_path, "configuration file")->required();
  experiment->add_option("--out", out_path, "output directory (overrides experiment.output)");
  experiment->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  std::string samples_path;
  std::string limit_spec;
  auto* kscheck = app.add_subcommand("kscheck", "Kolmogorov-Smirnov distance of samples to a limit law");
  kscheck->add_option("--samples", samples_path, "CSV with the samples in the first column")->required();
  kscheck->add_option("--limit", limit_spec, "stable:ALPHA:ETA or normal:SIGMA2")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*theory) return cmd_theory(alpha, d, c_a, a_const);
    if (*simulate) return cmd_simulate(config_path, out_path, n_opt, seed_opt);
    if (*experiment) return cmd_experiment(config_path, out_path, workers);
    if (*kscheck) return cmd_kscheck(samples_path, limit_spec);
  } catch (const lt::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const lt::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lt::InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
