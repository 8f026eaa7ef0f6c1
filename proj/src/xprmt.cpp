#include "cftp/xprmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "cftp/apprenticeship.hpp"
#include "cftp/errors.hpp"
#include "cftp/estimators.hpp"
#include "cftp/eval_store.hpp"
#include "cftp/exact_sampling.hpp"
#include "cftp/generators.hpp"
#include "cftp/solvers.hpp"
#include "cftp/svg.hpp"
#include "cftp/text_format.hpp"

namespace cftp::xprmt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ValidationError("parameter " + key + ": not a finite number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    // Accept integral values written in exponent form, e.g. 1e6.
    const double v = parse_real(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
      throw ValidationError("parameter " + key + ": not a non-negative integer: '" + text + "'");
    }
    return static_cast<std::uint64_t>(v);
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ValidationError("parameter " + key + ": integer out of range: '" + text + "'");
  }
}

struct Stats {
  double mean = kNaN;
  double se = kNaN;
};

Stats mean_se(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) {
    if (!std::isfinite(x)) return s;
  }
  const double n = static_cast<double>(v.size());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return s;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / (n - 1.0) / n);
  return s;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string actions_label(const DeterministicPolicy& pi) {
  std::string s;
  for (std::size_t a : pi.actions()) s += std::to_string(a);
  return s;
}

Table summary_table(const std::string& name, const std::vector<std::pair<std::string, std::string>>& rows) {
  Table t{name, {"metric", "value"}, {}};
  for (const auto& [k, v] : rows) t.add({k, v});
  return t;
}

double summary_value(const std::string& v) {
  if (v == "true") return 1.0;
  if (v == "false") return 0.0;
  if (v == "nan") return kNaN;
  return std::strtod(v.c_str(), nullptr);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

TabularMDP instance_mdp(const Config& cfg) {
  const std::string& file = cfg.str("mdp_file");
  TabularMDP mdp = [&] {
    if (!file.empty()) return load_mdp(file);
    Rng rng(cfg.u64("instance_seed"));
    return random_mdp(cfg.count("states"), cfg.count("actions"), cfg.count("features"), rng);
  }();
  for (const auto& pi : enumerate_policies(mdp, 1u << 16)) {
    if (!induce_chain(mdp, pi).is_ergodic()) throw ValidationError("instance: a deterministic policy is not ergodic");
  }
  return mdp;
}

}  // namespace

// ---------------------------------------------------------------- Config

void Config::merge_text(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (!has(key)) values_[key] = trim(line.substr(eq + 1));
  }
}

void Config::merge_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  merge_text(ss.str());
}

void Config::resolve(const std::map<std::string, std::string>& defaults) {
  for (const auto& [k, v] : values_) {
    if (!defaults.count(k)) throw ValidationError("unknown parameter '" + k + "' for " + command_);
  }
  for (const auto& [k, v] : defaults) {
    if (!has(k)) values_[k] = v;
  }
}

const std::string& Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("missing parameter " + key);
  return it->second;
}

double Config::real(const std::string& key) const { return parse_real(key, str(key)); }

std::size_t Config::count(const std::string& key) const { return static_cast<std::size_t>(parse_u64(key, str(key))); }

std::uint64_t Config::u64(const std::string& key) const { return parse_u64(key, str(key)); }

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(str(key))) out.push_back(parse_real(key, item));
  return out;
}

std::vector<std::size_t> Config::counts(const std::string& key) const {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(str(key))) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  return out;
}

std::string Config::echo() const {
  std::string out = "command = " + command_ + "\n";
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : echo()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------- tables

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("Table " + name + ": row width mismatch");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& col) const {
  auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw std::logic_error("Table " + name + ": no column " + col);
  return static_cast<std::size_t>(it - columns.begin());
}

std::string Table::to_csv(std::uint64_t config_hash, const std::string& command) const {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  std::string out = std::string("# config ") + hash + " " + command + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  return out;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }

void write_output(const Output& out, const Config& config, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream os(fs::path(dir) / file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (fs::path(dir) / file).string());
    os << text;
  };
  write("config.txt", config.echo());
  for (const auto& t : out.tables) write(t.name + ".csv", t.to_csv(config.hash(), config.command()));
  for (const auto& [file, svg] : out.figures) write(file, svg);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<std::size_t> log_grid(std::size_t start, std::size_t top) {
  std::vector<std::size_t> out;
  for (std::size_t decade = 1; decade <= top; decade *= 10) {
    for (std::size_t m : {1, 2, 5}) {
      const std::size_t v = m * decade;
      if (v >= start && v <= top) out.push_back(v);
    }
    if (decade > top / 10) break;
  }
  if (out.empty() || out.back() != top) out.push_back(top);
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kNaN;
    mx += std::log10(x[i]);
    my += std::log10(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log10(x[i]) - mx;
    sxy += dx * (std::log10(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : kNaN;
}

// ---------------------------------------------------------------- example

Output run_example(Config& cfg) {
  cfg.resolve({{"seed", "1"},
               {"replicates", "10"},
               {"runs", "100000"},
               {"t_guess", "2,4,30"},
               {"max_steps", "200000"},
               {"step_cap", "1000000"}});
  const std::uint64_t seed = cfg.u64("seed");
  const std::size_t replicates = cfg.count("replicates");
  const std::size_t runs = cfg.count("runs");
  const std::vector<std::size_t> t_guess = cfg.counts("t_guess");
  const std::size_t max_steps = cfg.count("max_steps");
  const std::size_t step_cap = cfg.count("step_cap");
  require(replicates >= 2, "example: replicates must be at least 2");
  require(runs >= 10, "example: runs must be at least 10");
  require(max_steps >= 100, "example: max_steps must be at least 100");
  require(step_cap >= 1, "example: step_cap must be positive");

  const MarkovChain chain = example_chain();
  const Eigen::Vector2d mu0(0.0, 1.0);
  const double rho = average_reward(chain);
  const std::vector<std::size_t> run_grid = log_grid(10, runs);
  const std::vector<std::size_t> step_grid = log_grid(100, max_steps);

  struct Estimator {
    std::string name;
    bool is_cftp;
    std::size_t t;
    double bias2;
  };
  std::vector<Estimator> estimators;
  for (std::size_t t : t_guess) {
    Eigen::RowVectorXd dist = mu0.transpose();
    for (std::size_t i = 0; i < t; ++i) dist = dist * chain.transition();
    const double bias = dist.dot(chain.reward_mean()) - rho;
    estimators.push_back({"tguess_" + std::to_string(t), false, t, bias * bias});
  }
  estimators.push_back({"cftp", true, 0, 0.0});
  const std::size_t n_est = estimators.size();

  struct Curve {
    std::vector<double> run_sq, step_sq, step_n;
  };
  std::vector<Curve> curves(replicates * n_est);
  parallel_for(replicates * n_est, cfg.threads(), [&](std::size_t job) {
    const std::size_t r = job / n_est;
    const std::size_t e = job % n_est;
    const Estimator& est = estimators[e];
    Rng rng(derive_seed(seed, {r, e}));
    Curve& c = curves[job];
    double sum = 0.0;
    std::size_t n = 0;
    std::size_t steps = 0;
    std::size_t ri = 0, si = 0;
    auto sq = [&] { return n ? (sum / static_cast<double>(n) - rho) * (sum / static_cast<double>(n) - rho) : kNaN; };
    while (n < runs || steps < max_steps) {
      double reward;
      std::size_t cost;
      if (est.is_cftp) {
        const CoalescenceRecord rec = cftp(chain, rng, step_cap);
        reward = chain.sample_reward(rec.state, rng);
        cost = static_cast<std::size_t>(rec.calls);
      } else {
        std::size_t s = rng.categorical(std::span<const double>(mu0.data(), 2));
        for (std::size_t i = 0; i < est.t; ++i) s = chain.sample_next(s, rng);
        reward = chain.sample_reward(s, rng);
        cost = est.t;
      }
      // Budgets strictly below the new cumulative cost see only earlier samples.
      while (si < step_grid.size() && step_grid[si] < steps + cost) {
        c.step_sq.push_back(sq());
        c.step_n.push_back(static_cast<double>(n));
        ++si;
      }
      sum += reward;
      ++n;
      steps += cost;
      if (ri < run_grid.size() && run_grid[ri] == n) {
        c.run_sq.push_back(sq());
        ++ri;
      }
    }
    while (si < step_grid.size()) {
      c.step_sq.push_back(sq());
      c.step_n.push_back(static_cast<double>(n));
      ++si;
    }
  });

  Output out;
  Table runs_t{"example_mse_runs", {"estimator", "t_guess", "runs", "mse_mean", "mse_se", "bias2_exact"}, {}};
  Table steps_t{"example_mse_steps", {"estimator", "t_guess", "steps", "runs_mean", "mse_mean", "mse_se"}, {}};
  std::vector<std::pair<std::string, std::string>> summary{{"rho_exact", num(rho)},
                                                           {"replicates", num(replicates)},
                                                           {"runs", num(runs)},
                                                           {"step_budget", num(max_steps)}};
  std::map<std::string, Stats> at_budget;
  for (std::size_t e = 0; e < n_est; ++e) {
    const Estimator& est = estimators[e];
    const std::string tg = est.is_cftp ? "cftp" : std::to_string(est.t);
    std::vector<double> xs, ys;
    Stats final_stats;
    for (std::size_t k = 0; k < run_grid.size(); ++k) {
      std::vector<double> v;
      for (std::size_t r = 0; r < replicates; ++r) v.push_back(curves[r * n_est + e].run_sq[k]);
      const Stats s = mean_se(v);
      runs_t.add({est.name, tg, num(run_grid[k]), num(s.mean), num(s.se), num(est.bias2)});
      if (run_grid[k] * 10 >= runs) {
        xs.push_back(static_cast<double>(run_grid[k]));
        ys.push_back(s.mean);
      }
      final_stats = s;
    }
    for (std::size_t k = 0; k < step_grid.size(); ++k) {
      std::vector<double> v, nr;
      for (std::size_t r = 0; r < replicates; ++r) {
        v.push_back(curves[r * n_est + e].step_sq[k]);
        nr.push_back(curves[r * n_est + e].step_n[k]);
      }
      const Stats s = mean_se(v);
      steps_t.add({est.name, tg, num(step_grid[k]), num(mean_se(nr).mean), num(s.mean), num(s.se)});
      if (k + 1 == step_grid.size()) at_budget[est.name] = s;
    }
    summary.emplace_back("bias2_" + est.name, num(est.bias2));
    summary.emplace_back("final_mse_" + est.name, num(final_stats.mean));
    summary.emplace_back("final_se_" + est.name, num(final_stats.se));
    summary.emplace_back("slope_last_decade_" + est.name, num(loglog_slope(xs, ys)));
    summary.emplace_back("budget_mse_" + est.name, num(at_budget[est.name].mean));
    summary.emplace_back("budget_se_" + est.name, num(at_budget[est.name].se));
  }
  if (at_budget.count("tguess_30")) {
    summary.emplace_back("cftp_beats_tguess_30_at_budget",
                         at_budget["cftp"].mean < at_budget["tguess_30"].mean ? "true" : "false");
  }
  for (const auto& [k, v] : summary) out.summary[k] = summary_value(v);

  out.figures.emplace_back("mse_vs_runs.svg", line_chart(runs_t, {"MSE vs. runs", "runs", "mse_mean", "mse_se",
                                                                  "estimator", "runs", "MSE", true, true}));
  out.figures.emplace_back("mse_vs_steps.svg", line_chart(steps_t, {"MSE vs. steps", "steps", "mse_mean", "mse_se",
                                                                    "estimator", "simulation steps", "MSE", true, true}));
  out.tables.push_back(std::move(runs_t));
  out.tables.push_back(std::move(steps_t));
  out.tables.push_back(summary_table("example_summary", summary));
  return out;
}

// ---------------------------------------------------------------- coalescence

Output run_coalescence(Config& cfg) {
  cfg.resolve({{"seed", "1"},
               {"replicates", "500"},
               {"sizes", "5,10,20"},
               {"chains", "4"},
               {"support", "3"},
               {"lb_states", "20"},
               {"lb_eps", "0.05,0.1,0.2,0.5"},
               {"lb_runs", "2000"},
               {"grand_states", "16"},
               {"grand_chains", "4"},
               {"grand_runs", "1000"},
               {"delta", "0.1,0.05"},
               {"step_cap", "10000000"}});
  const std::uint64_t seed = cfg.u64("seed");
  const std::size_t runs = cfg.count("replicates");
  const auto sizes = cfg.counts("sizes");
  const std::size_t n_chains = cfg.count("chains");
  const std::size_t support = cfg.count("support");
  const std::size_t lb_states = cfg.count("lb_states");
  const auto lb_eps = cfg.reals("lb_eps");
  const std::size_t lb_runs = cfg.count("lb_runs");
  const std::size_t grand_states = cfg.count("grand_states");
  const std::size_t grand_chains = cfg.count("grand_chains");
  const std::size_t grand_runs = cfg.count("grand_runs");
  const auto deltas = cfg.reals("delta");
  const std::size_t step_cap = cfg.count("step_cap");
  require(runs >= 1 && lb_runs >= 1 && grand_runs >= 1, "coalescence: run counts must be positive");
  for (std::size_t n : sizes) require(n >= 2, "coalescence: sizes must be at least 2");
  for (double e : lb_eps) require(e > 0.0 && e < 1.0, "coalescence: lb_eps entries must lie in (0, 1)");
  for (double d : deltas) require(d > 0.0 && d < 1.0, "coalescence: delta entries must lie in (0, 1)");
  require(lb_states >= 2 && grand_states >= 2, "coalescence: state counts must be at least 2");
  require(step_cap >= 1, "coalescence: step_cap must be positive");

  enum class Kind { independent, shared, grand };
  struct Job {
    std::string family;
    std::size_t n;
    double eps;
    std::size_t chain_id;
    std::shared_ptr<MarkovChain> chain;
    Kind kind;
    std::size_t runs;
    std::size_t tmix = 0;
  };
  std::vector<Job> jobs;
  for (std::size_t n : sizes) {
    for (std::size_t c = 0; c < n_chains; ++c) {
      Rng rng(derive_seed(seed, {1, n, c}));
      auto chain = std::make_shared<MarkovChain>(random_ergodic_chain(n, support, rng));
      for (Kind k : {Kind::independent, Kind::shared, Kind::grand}) jobs.push_back({"random", n, kNaN, c, chain, k, runs});
    }
  }
  for (double e : lb_eps) {
    auto chain = std::make_shared<MarkovChain>(lower_bound_chain(lb_states, e));
    jobs.push_back({"lower_bound", lb_states, e, 0, chain, Kind::independent, lb_runs});
  }
  for (std::size_t c = 0; c < grand_chains; ++c) {
    Rng rng(derive_seed(seed, {2, grand_states, c}));
    auto chain = std::make_shared<MarkovChain>(random_ergodic_chain(grand_states, support, rng));
    jobs.push_back({"grand", grand_states, kNaN, c, chain, Kind::grand, grand_runs});
  }
  for (auto& j : jobs) j.tmix = mixing_time(*j.chain);

  std::vector<std::vector<double>> times(jobs.size());
  std::vector<std::size_t> capped(jobs.size(), 0);
  parallel_for(jobs.size(), cfg.threads(), [&](std::size_t i) {
    const Job& j = jobs[i];
    Rng rng(derive_seed(seed, {3, i}));
    for (std::size_t r = 0; r < j.runs; ++r) {
      try {
        if (j.kind == Kind::grand) {
          times[i].push_back(static_cast<double>(grand_coupling_sim(*j.chain, rng, step_cap).merge_time));
        } else {
          std::size_t a = 0, b = 1;
          if (j.family == "random") {
            a = rng.below(j.n);
            b = (a + 1 + rng.below(j.n - 1)) % j.n;
          }
          const PairCoupling pc = j.kind == Kind::independent ? PairCoupling::independent : PairCoupling::shared_map;
          times[i].push_back(static_cast<double>(two_chain_coalesce(*j.chain, a, b, pc, rng, step_cap).t_c));
        }
      } catch (const StepCapExceeded&) {
        ++capped[i];
        times[i].push_back(static_cast<double>(step_cap));
      }
    }
  });

  auto kind_name = [](Kind k) {
    return k == Kind::independent ? "two_chain_independent" : k == Kind::shared ? "two_chain_shared" : "grand";
  };
  Output out;
  Table runs_t{"coalescence_runs",
               {"family", "n_states", "epsilon", "chain", "tmix", "coupling", "runs", "mean_tc", "se_tc", "q50", "q90",
                "q99", "max_tc", "cap_exceeded", "ref_2_S_tmix", "ref_S_over_2eps"},
               {}};
  Table tails_t{"coalescence_tails",
                {"family", "n_states", "epsilon", "chain", "coupling", "delta", "bound", "exceed", "runs", "fraction"},
                {}};
  Table scaling_t{"coalescence_scaling", {"n_states", "series", "value"}, {}};
  Table lb_t{"coalescence_lower_bound", {"epsilon", "series", "value"}, {}};
  std::map<std::pair<std::size_t, std::string>, std::vector<double>> scaling;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    const Stats s = mean_se(times[i]);
    const double n = static_cast<double>(j.n);
    const double ref3 = 2.0 * n * static_cast<double>(j.tmix);
    const double ref4 = j.family == "lower_bound" ? n / (2.0 * j.eps) : kNaN;
    runs_t.add({j.family, num(j.n), num(j.eps), num(j.chain_id), num(j.tmix), kind_name(j.kind), num(j.runs),
                num(s.mean), num(s.se), num(quantile(times[i], 0.5)), num(quantile(times[i], 0.9)),
                num(quantile(times[i], 0.99)), num(*std::max_element(times[i].begin(), times[i].end())),
                num(capped[i]), num(ref3), num(ref4)});
    for (double d : deltas) {
      const double bound = (j.kind == Kind::grand ? 512.0 : 2.0) * n * static_cast<double>(j.tmix) * std::log(1.0 / d);
      const auto exceed = static_cast<std::size_t>(
          std::count_if(times[i].begin(), times[i].end(), [&](double t) { return t > bound; }));
      tails_t.add({j.family, num(j.n), num(j.eps), num(j.chain_id), kind_name(j.kind), num(d), num(bound),
                   num(exceed), num(j.runs), num(static_cast<double>(exceed) / static_cast<double>(j.runs))});
    }
    if (j.family == "random") {
      scaling[{j.n, std::string("mean_tc_") + kind_name(j.kind)}].push_back(s.mean);
      if (j.kind == Kind::independent) scaling[{j.n, "ref_2_S_tmix"}].push_back(ref3);
      if (j.kind == Kind::grand && !deltas.empty()) {
        scaling[{j.n, "ref_512_S_tmix_log"}].push_back(512.0 * n * static_cast<double>(j.tmix) *
                                                        std::log(1.0 / deltas.back()));
      }
    }
    if (j.family == "lower_bound") {
      lb_t.add({num(j.eps), "mean_tc", num(s.mean)});
      lb_t.add({num(j.eps), "ref_S_over_2eps", num(ref4)});
      lb_t.add({num(j.eps), "ref_S_tmix_over_6", num(n * static_cast<double>(j.tmix) / 6.0)});
    }
  }
  for (const auto& [key, v] : scaling) scaling_t.add({num(key.first), key.second, num(mean_se(v).mean)});

  out.figures.emplace_back("coalescence_scaling.svg",
                           line_chart(scaling_t, {"Coalescence time vs. |S| (random chains)", "n_states", "value", "",
                                                  "series", "|S|", "steps", false, true}));
  out.figures.emplace_back("coalescence_lower_bound.svg",
                           line_chart(lb_t, {"Lower-bound chain", "epsilon", "value", "", "series", "epsilon",
                                             "steps", true, true}));
  std::size_t total_capped = std::accumulate(capped.begin(), capped.end(), std::size_t{0});
  out.summary["cap_exceeded"] = static_cast<double>(total_capped);
  out.tables.push_back(std::move(runs_t));
  out.tables.push_back(std::move(tails_t));
  out.tables.push_back(std::move(scaling_t));
  out.tables.push_back(std::move(lb_t));
  out.tables.push_back(summary_table("coalescence_summary", {{"jobs", num(jobs.size())}, {"cap_exceeded", num(total_capped)}}));
  return out;
}

// ---------------------------------------------------------------- mwal

namespace {

Output mwal_experiment(Config& cfg, bool generative) {
  std::map<std::string, std::string> defaults{{"seed", "1"},
                                              {"replicates", "20"},
                                              {"states", "4"},
                                              {"actions", "2"},
                                              {"features", "2"},
                                              {"instance_seed", "11"},
                                              {"mdp_file", ""},
                                              {"epsilon", generative ? "0.15" : "0.1"},
                                              {"delta", "0.1"},
                                              {"T", generative ? "3000" : "0"},
                                              {"expert_w", "0.3,0.7"},
                                              {"expert_mix", "0"},
                                              {"rounds_replicates", "1"},
                                              {"step_cap", "10000000"}};
  if (generative) {
    defaults.insert({{"b", "1"},
                     {"tail_samples", "20000"},
                     {"cycle_states", "10"},
                     {"cycle_eps", "0.01"},
                     {"sparsity", "2"},
                     {"ell_max", "4"}});
  } else {
    defaults.insert({"m", "0"});
  }
  cfg.resolve(defaults);
  const std::uint64_t seed = cfg.u64("seed");
  const std::size_t replicates = cfg.count("replicates");
  const double eps = cfg.real("epsilon");
  const double delta = cfg.real("delta");
  const double mix = cfg.real("expert_mix");
  const std::size_t rounds_reps = cfg.count("rounds_replicates");
  const std::size_t step_cap = cfg.count("step_cap");
  require(replicates >= 1, "mwal: replicates must be positive");
  require(eps > 0.0, "mwal: epsilon must be positive");
  require(delta > 0.0 && delta < 1.0, "mwal: delta must lie in (0, 1)");
  require(mix >= 0.0 && mix <= 1.0, "mwal: expert_mix must lie in [0, 1]");
  const TabularMDP mdp = instance_mdp(cfg);
  require(mdp.has_features(), "mwal: the instance has no features");
  const std::size_t k = mdp.n_features();
  std::vector<double> wstar = cfg.str("expert_w").empty() ? std::vector<double>(k, 1.0 / static_cast<double>(k))
                                                          : cfg.reals("expert_w");
  require(wstar.size() == k, "mwal: expert_w needs one entry per feature");
  for (double w : wstar) require(w >= 0.0, "mwal: expert_w entries must be non-negative");
  const double wsum = std::accumulate(wstar.begin(), wstar.end(), 0.0);
  require(wsum > 0.0, "mwal: expert_w must not be all zero");
  const Eigen::VectorXd w_true = Eigen::Map<const Eigen::VectorXd>(wstar.data(), static_cast<Eigen::Index>(k)) / wsum;

  std::size_t T = cfg.count("T");
  std::size_t m = 0;
  double b = 0.0;
  if (generative) {
    b = cfg.real("b");
    require(b > 0.0, "mwal-gen: b must be positive");
    require(T >= 1, "mwal-gen: T must be positive");
  } else {
    if (T == 0) T = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(144.0 / (eps * eps) * std::log(static_cast<double>(k)))));
    m = cfg.count("m");
    if (m == 0) m = static_cast<std::size_t>(std::ceil(18.0 / (eps * eps) * std::log(2.0 * static_cast<double>(k) / delta)));
  }

  const DeterministicPolicy pi_star = optimal_policy(mdp, Eigen::VectorXd(mdp.features() * w_true)).policy;
  Eigen::MatrixXd probs = (1.0 - mix) * StochasticPolicy::from_deterministic(pi_star, mdp.n_actions()).probs();
  probs.array() += mix / static_cast<double>(mdp.n_actions());
  const StochasticPolicy expert_policy(probs);
  const Eigen::VectorXd phi_expert = feature_expectations_exact(mdp, expert_policy);
  const GameValue game = game_value_oracle(mdp, expert_policy, k);

  std::vector<std::optional<MwalResult>> results(replicates);
  parallel_for(replicates, cfg.threads(), [&](std::size_t r) {
    ExpertModel expert(expert_policy, derive_seed(seed, {r, 1}));
    MwalOptions opts;
    opts.step_cap = step_cap;
    results[r] = generative ? mwal_generative(mdp, expert, k, T, delta, b, derive_seed(seed, {r, 2}), opts)
                            : mwal(mdp, expert, k, T, m, derive_seed(seed, {r, 2}), opts);
  });

  const std::string prefix = generative ? "mwal_gen" : "mwal";
  Output out;
  std::vector<std::string> round_cols{"replicate", "t"};
  for (std::size_t i = 0; i < k; ++i) round_cols.push_back("w_" + std::to_string(i));
  round_cols.push_back("round_reward");
  for (std::size_t i = 0; i < k; ++i) round_cols.push_back("loss_" + std::to_string(i));
  round_cols.push_back("policy");
  round_cols.push_back("n_clamped");
  if (generative) round_cols.push_back("t_c");
  Table rounds_t{prefix + "_rounds", round_cols, {}};
  Table summary_t{prefix + "_replicates",
                  {"replicate", "T", "m", "loss_bound", "v_star", "margin", "success", "rho_mixture", "rho_expert",
                   "generative_calls", "expert_calls", "n_clamped"},
                  {}};
  std::size_t successes = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < replicates; ++r) {
    const MwalResult& res = *results[r];
    if (r < rounds_reps) {
      for (std::size_t t = 0; t < res.rounds.size(); ++t) {
        const MwalRound& rd = res.rounds[t];
        std::vector<std::string> row{num(r), num(t + 1)};
        for (std::size_t i = 0; i < k; ++i) row.push_back(num(rd.w[static_cast<Eigen::Index>(i)]));
        row.push_back(num(rd.round_reward));
        for (std::size_t i = 0; i < k; ++i) row.push_back(num(rd.loss[static_cast<Eigen::Index>(i)]));
        row.push_back(actions_label(rd.policy));
        row.push_back(num(rd.n_clamped));
        if (generative) row.push_back(num(rd.t_c));
        rounds_t.add(std::move(row));
      }
    }
    const Eigen::VectorXd phi_mix = feature_expectations_exact(mdp, res.mixture);
    const double margin = worst_case_margin(phi_mix, phi_expert);
    const bool ok = margin >= game.value - eps;
    successes += ok;
    min_gap = std::min(min_gap, w_true.dot(phi_mix) - w_true.dot(phi_expert));
    summary_t.add({num(r), num(T), num(m), num(res.loss_bound), num(game.value), num(margin), ok ? "true" : "false",
                   num(w_true.dot(phi_mix)), num(w_true.dot(phi_expert)), num(static_cast<std::size_t>(res.ledger.generative_calls())),
                   num(static_cast<std::size_t>(res.ledger.expert_calls())), num(res.n_clamped)});
  }
  const double frac = static_cast<double>(successes) / static_cast<double>(replicates);
  std::vector<std::pair<std::string, std::string>> summary{
      {"v_star", num(game.value)},       {"v_star_maximin", num(game.maximin)}, {"v_star_resolution", num(game.resolution)},
      {"epsilon", num(eps)},             {"T", num(T)},                         {"success_fraction", num(frac)},
      {"successes", num(successes)},     {"replicates", num(replicates)},
      {"min_rho_gap", num(min_gap)}};
  if (!generative) summary.emplace_back("m", num(m));
  out.summary["min_rho_gap"] = min_gap;
  out.summary["v_star"] = game.value;
  out.summary["success_fraction"] = frac;
  out.summary["T"] = static_cast<double>(T);
  out.summary["m"] = static_cast<double>(m);

  if (generative) {
    const std::size_t n_tail = cfg.count("tail_samples");
    const std::size_t cycle_n = cfg.count("cycle_states");
    const double cycle_eps = cfg.real("cycle_eps");
    const std::size_t p = cfg.count("sparsity");
    const std::size_t ell_max = cfg.count("ell_max");
    require(n_tail >= 1 && ell_max >= 1, "mwal-gen: tail_samples and ell_max must be positive");
    const TabularMDP cycle = sparse_cycle_mdp(cycle_n, cycle_eps, p, std::min<std::size_t>(2, p));
    const std::size_t blocks = (n_tail + 999) / 1000;
    std::vector<std::vector<double>> norms(blocks);
    const DeterministicPolicy lazy = DeterministicPolicy::constant(cycle_n, 1);
    const GameColumnSampler sampler(cycle, lazy, step_cap);
    const StochasticPolicy cycle_expert =
        StochasticPolicy::from_deterministic(DeterministicPolicy::constant(cycle_n, 0), 2);
    parallel_for(blocks, cfg.threads(), [&](std::size_t bi) {
      GenerativeModel dyn(cycle, derive_seed(seed, {9, bi, 1}));
      ExpertModel ex(cycle_expert, derive_seed(seed, {9, bi, 2}));
      const std::size_t count = std::min<std::size_t>(1000, n_tail - bi * 1000);
      for (std::size_t i = 0; i < count; ++i) norms[bi].push_back(sampler.sample(dyn, ex).g.cwiseAbs().maxCoeff());
    });
    std::vector<double> all;
    for (auto& v : norms) all.insert(all.end(), v.begin(), v.end());
    Table tail_t{"mwal_gen_tail",
                 {"ell", "threshold", "exceed", "samples", "fraction", "exp_minus_ell", "fraction_gt_ell"},
                 {}};
    const double total = static_cast<double>(all.size());
    auto above = [&](double thr) {
      return static_cast<std::size_t>(std::count_if(all.begin(), all.end(), [&](double g) { return g > thr; }));
    };
    for (std::size_t ell = 1; ell <= ell_max; ++ell) {
      const double thr = static_cast<double>(ell * p);
      const std::size_t ex = above(thr);
      tail_t.add({num(ell), num(thr), num(ex), num(all.size()), num(static_cast<double>(ex) / total),
                  num(std::exp(-static_cast<double>(ell))), num(static_cast<double>(above(static_cast<double>(ell))) / total)});
    }
    out.tables.push_back(std::move(tail_t));
  }
  if (!rounds_t.rows.empty()) {
    out.figures.emplace_back(prefix + "_weights.svg",
                             line_chart(rounds_t, {"Hedge weight on feature 0", "t", "w_0", "", "", "round", "w_0",
                                                   false, false}));
  }
  out.tables.push_back(std::move(rounds_t));
  out.tables.push_back(std::move(summary_t));
  out.tables.push_back(summary_table(prefix + "_summary", summary));
  return out;
}

}  // namespace

Output run_mwal(Config& cfg) { return mwal_experiment(cfg, false); }
Output run_mwal_gen(Config& cfg) { return mwal_experiment(cfg, true); }

// ---------------------------------------------------------------- pg

Output run_pg(Config& cfg) {
  cfg.resolve({{"seed", "1"},
               {"replicates", "100000"},
               {"instance", "single"},
               {"states", "3"},
               {"actions", "2"},
               {"instance_seed", "11"},
               {"theta_scale", "1"},
               {"fd_step", "1e-5"},
               {"step_cap", "10000000"}});
  const std::uint64_t seed = cfg.u64("seed");
  const std::size_t samples = cfg.count("replicates");
  const std::string& instance = cfg.str("instance");
  const double h = cfg.real("fd_step");
  const std::size_t step_cap = cfg.count("step_cap");
  require(samples >= 2, "pg: replicates (sample count) must be at least 2");
  require(h > 0.0, "pg: fd_step must be positive");
  require(instance == "single" || instance == "random", "pg: instance must be 'single' or 'random'");

  std::unique_ptr<TabularMDP> mdp;
  Eigen::MatrixXd theta;
  if (instance == "single") {
    Eigen::MatrixXd r(1, 2);
    r << 1.0, 0.0;
    mdp = std::make_unique<TabularMDP>(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)}, r);
    theta = Eigen::MatrixXd::Zero(1, 2);
  } else {
    Rng rng(cfg.u64("instance_seed"));
    mdp = std::make_unique<TabularMDP>(random_mdp(cfg.count("states"), cfg.count("actions"), 0, rng));
    const double scale = cfg.real("theta_scale");
    theta.resize(static_cast<Eigen::Index>(mdp->n_states()), static_cast<Eigen::Index>(mdp->n_actions()));
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta.data()[i] = scale * (2.0 * rng.uniform() - 1.0);
  }
  const SoftmaxPolicy policy(theta);
  const PolicyGradientSampler sampler(*mdp, policy, step_cap);
  const Eigen::MatrixXd exact = exact_policy_gradient(*mdp, policy);
  Eigen::MatrixXd fd(theta.rows(), theta.cols());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::MatrixXd tp = theta, tm = theta;
    tp.data()[i] += h;
    tm.data()[i] -= h;
    fd.data()[i] = (average_reward(*mdp, SoftmaxPolicy(tp).policy()) - average_reward(*mdp, SoftmaxPolicy(tm).policy())) / (2.0 * h);
  }

  const std::size_t blocks = (samples + 999) / 1000;
  std::vector<Eigen::MatrixXd> sum(blocks), sumsq(blocks);
  std::vector<double> tc(blocks, 0.0);
  parallel_for(blocks, cfg.threads(), [&](std::size_t bi) {
    Rng rng(derive_seed(seed, {bi}));
    sum[bi] = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
    sumsq[bi] = sum[bi];
    const std::size_t count = std::min<std::size_t>(1000, samples - bi * 1000);
    for (std::size_t i = 0; i < count; ++i) {
      const GradientSample g = sampler.sample(rng);
      sum[bi] += g.gradient;
      sumsq[bi] += g.gradient.cwiseProduct(g.gradient);
      tc[bi] += static_cast<double>(g.t_c);
    }
  });
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(theta.rows(), theta.cols()), ss = s;
  double tc_total = 0.0;
  for (std::size_t bi = 0; bi < blocks; ++bi) {
    s += sum[bi];
    ss += sumsq[bi];
    tc_total += tc[bi];
  }
  const double n = static_cast<double>(samples);
  const Eigen::MatrixXd mean = s / n;
  const Eigen::MatrixXd var = ((ss / n - mean.cwiseProduct(mean)) * (n / (n - 1.0))).cwiseMax(0.0);
  Table grad_t{"pg_gradient", {"state", "action", "estimate", "se", "exact", "finite_difference", "z_exact"}, {}};
  double max_z = 0.0;
  for (Eigen::Index si = 0; si < theta.rows(); ++si) {
    for (Eigen::Index a = 0; a < theta.cols(); ++a) {
      const double se = std::sqrt(var(si, a) / n);
      const double z = se > 0 ? (mean(si, a) - exact(si, a)) / se : (mean(si, a) == exact(si, a) ? 0.0 : kNaN);
      max_z = std::max(max_z, std::fabs(z));
      grad_t.add({num(static_cast<std::size_t>(si)), num(static_cast<std::size_t>(a)), num(mean(si, a)), num(se),
                  num(exact(si, a)), num(fd(si, a)), num(z)});
    }
  }
  Output out;
  out.summary["max_abs_z"] = max_z;
  out.tables.push_back(std::move(grad_t));
  out.tables.push_back(summary_table("pg_summary", {{"instance", instance},
                                                    {"samples", num(samples)},
                                                    {"rho", num(average_reward(*mdp, policy.policy()))},
                                                    {"mean_t_c", num(tc_total / n)},
                                                    {"max_abs_z", num(max_z)},
                                                    {"within_3_se", max_z <= 3.0 ? "true" : "false"}}));
  return out;
}

// ---------------------------------------------------------------- eval-store

Output run_eval_store(Config& cfg) {
  cfg.resolve({{"seed", "1"},
               {"replicates", "100"},
               {"states", "3"},
               {"actions", "2"},
               {"features", "0"},
               {"instance_seed", "5"},
               {"mdp_file", ""},
               {"epsilon", "0.1"},
               {"delta", "0.1"},
               {"copies", "0"},
               {"fresh", "1"},
               {"step_cap", "10000000"}});
  const std::uint64_t seed = cfg.u64("seed");
  const std::size_t ensembles = cfg.count("replicates");
  const double eps = cfg.real("epsilon");
  const double delta = cfg.real("delta");
  const bool fresh = cfg.count("fresh") != 0;
  const std::size_t step_cap = cfg.count("step_cap");
  require(ensembles >= 1, "eval-store: replicates must be positive");
  require(eps > 0.0 && delta > 0.0 && delta < 1.0, "eval-store: need epsilon > 0 and 0 < delta < 1");
  const TabularMDP mdp = instance_mdp(cfg);
  const std::vector<DeterministicPolicy> policies = enumerate_policies(mdp, 4096);
  std::size_t copies = cfg.count("copies");
  if (copies == 0) copies = ensemble_size(eps, delta, policies.size());
  std::vector<double> exact;
  for (const auto& pi : policies) exact.push_back(average_reward(mdp, pi));

  struct EnsembleRun {
    std::vector<double> est;
    double max_err = 0.0, fresh_max_err = kNaN, mean_rows = 0.0;
    std::uint64_t shared_calls = 0, fresh_calls = 0;
  };
  std::vector<EnsembleRun> runs(ensembles);
  parallel_for(ensembles, cfg.threads(), [&](std::size_t e) {
    EnsembleRun& run = runs[e];
    StoreEnsemble ensemble(mdp, copies, derive_seed(seed, {e, 1}));
    const EnsembleEstimates est = estimate_all(ensemble, policies, step_cap);
    run.est = est.estimates;
    for (std::size_t p = 0; p < policies.size(); ++p) run.max_err = std::max(run.max_err, std::fabs(est.estimates[p] - exact[p]));
    run.shared_calls = est.generative_calls;
    for (std::size_t c = 0; c < ensemble.size(); ++c) run.mean_rows += static_cast<double>(ensemble.copy(c).rows());
    run.mean_rows /= static_cast<double>(ensemble.size());
    if (fresh) {
      const EnsembleEstimates f = estimate_fresh(mdp, policies, copies, derive_seed(seed, {e, 2}), step_cap);
      run.fresh_calls = f.generative_calls;
      run.fresh_max_err = 0.0;
      for (std::size_t p = 0; p < policies.size(); ++p) {
        run.fresh_max_err = std::max(run.fresh_max_err, std::fabs(f.estimates[p] - exact[p]));
      }
    }
  });

  Output out;
  Table ens_t{"eval_store_ensembles",
              {"ensemble", "copies", "max_error", "success", "shared_calls", "fresh_calls", "fresh_max_error", "mean_rows"},
              {}};
  std::size_t successes = 0;
  std::uint64_t shared_total = 0, fresh_total = 0;
  for (std::size_t e = 0; e < ensembles; ++e) {
    const EnsembleRun& r = runs[e];
    const bool ok = r.max_err <= eps;
    successes += ok;
    shared_total += r.shared_calls;
    fresh_total += r.fresh_calls;
    ens_t.add({num(e), num(copies), num(r.max_err), ok ? "true" : "false", num(static_cast<std::size_t>(r.shared_calls)),
               fresh ? num(static_cast<std::size_t>(r.fresh_calls)) : "nan", num(r.fresh_max_err), num(r.mean_rows)});
  }
  Table pol_t{"eval_store_policies", {"policy", "exact_rho", "mean_estimate", "se_estimate"}, {}};
  for (std::size_t p = 0; p < policies.size(); ++p) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.est[p]);
    const Stats s = mean_se(v);
    pol_t.add({actions_label(policies[p]), num(exact[p]), num(s.mean), num(s.se)});
  }
  const double frac = static_cast<double>(successes) / static_cast<double>(ensembles);
  std::vector<std::pair<std::string, std::string>> summary{
      {"policies", num(policies.size())},
      {"copies", num(copies)},
      {"success_fraction", num(frac)},
      {"shared_calls_total", num(static_cast<std::size_t>(shared_total))}};
  if (fresh) {
    summary.emplace_back("fresh_calls_total", num(static_cast<std::size_t>(fresh_total)));
    summary.emplace_back("shared_calls_lt_fresh_calls", shared_total < fresh_total ? "true" : "false");
    out.summary["shared_lt_fresh"] = shared_total < fresh_total;
  }
  out.summary["success_fraction"] = frac;
  out.summary["copies"] = static_cast<double>(copies);
  out.summary["shared_calls"] = static_cast<double>(shared_total);
  out.summary["fresh_calls"] = static_cast<double>(fresh_total);
  out.tables.push_back(std::move(ens_t));
  out.tables.push_back(std::move(pol_t));
  out.tables.push_back(summary_table("eval_store_summary", summary));
  return out;
}

// ---------------------------------------------------------------- dispatch

Output run(Config& config) {
  const std::string& c = config.command();
  if (c == "example") return run_example(config);
  if (c == "coalescence") return run_coalescence(config);
  if (c == "mwal") return run_mwal(config);
  if (c == "mwal-gen") return run_mwal_gen(config);
  if (c == "pg") return run_pg(config);
  if (c == "eval-store") return run_eval_store(config);
  throw ValidationError("unknown subcommand " + c);
}

std::string schema_help(const std::string& command) {
  static const std::map<std::string, std::string> help{
      {"example",
       "example_mse_runs.csv: estimator,t_guess,runs,mse_mean,mse_se,bias2_exact\n"
       "example_mse_steps.csv: estimator,t_guess,steps,runs_mean,mse_mean,mse_se\n"
       "example_summary.csv: metric,value\n"
       "figures: mse_vs_runs.svg, mse_vs_steps.svg (log-log, +-1 SE bars)\n"
       "run checkpoints 10,20,50,... up to runs; step checkpoints 100,200,500,... up to max_steps\n"},
      {"coalescence",
       "coalescence_runs.csv: family,n_states,epsilon,chain,tmix,coupling,runs,mean_tc,se_tc,q50,q90,q99,max_tc,"
       "cap_exceeded,ref_2_S_tmix,ref_S_over_2eps\n"
       "coalescence_tails.csv: family,n_states,epsilon,chain,coupling,delta,bound,exceed,runs,fraction\n"
       "coalescence_scaling.csv: n_states,series,value\n"
       "coalescence_lower_bound.csv: epsilon,series,value\n"
       "coalescence_summary.csv: metric,value\n"},
      {"mwal",
       "mwal_rounds.csv: replicate,t,w_0..w_{k-1},round_reward,loss_0..loss_{k-1},policy,n_clamped\n"
       "mwal_replicates.csv: replicate,T,m,loss_bound,v_star,margin,success,rho_mixture,rho_expert,"
       "generative_calls,expert_calls,n_clamped\n"
       "mwal_summary.csv: metric,value\n"},
      {"mwal-gen",
       "mwal_gen_rounds.csv: replicate,t,w_0..w_{k-1},round_reward,loss_0..loss_{k-1},policy,n_clamped,t_c\n"
       "mwal_gen_replicates.csv: as mwal_replicates.csv\n"
       "mwal_gen_tail.csv: ell,threshold,exceed,samples,fraction,exp_minus_ell,fraction_gt_ell\n"
       "mwal_gen_summary.csv: metric,value\n"},
      {"pg",
       "pg_gradient.csv: state,action,estimate,se,exact,finite_difference,z_exact\n"
       "pg_summary.csv: metric,value\n"},
      {"eval-store",
       "eval_store_ensembles.csv: ensemble,copies,max_error,success,shared_calls,fresh_calls,fresh_max_error,mean_rows\n"
       "eval_store_policies.csv: policy,exact_rho,mean_estimate,se_estimate\n"
       "eval_store_summary.csv: metric,value\n"}};
  auto it = help.find(command);
  return it == help.end() ? std::string() : it->second;
}

}  // namespace cftp::xprmt
