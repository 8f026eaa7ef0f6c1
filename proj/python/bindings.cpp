// Python bindings for the sampling, estimation and learning entry points.
// Matrices cross as NumPy arrays (Eigen type casters); seeds are plain ints.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cftp/apprenticeship.hpp"
#include "cftp/errors.hpp"
#include "cftp/estimators.hpp"
#include "cftp/eval_store.hpp"
#include "cftp/exact_sampling.hpp"
#include "cftp/generators.hpp"
#include "cftp/hedge.hpp"
#include "cftp/solvers.hpp"
#include "cftp/xprmt.hpp"

namespace py = pybind11;
using namespace cftp;

namespace {

std::vector<std::size_t> stationary_samples(const MarkovChain& chain, std::size_t n, std::uint64_t seed,
                                            std::size_t step_cap, bool representatives) {
  Rng rng(seed);
  std::vector<std::size_t> out(n);
  const CftpMode mode = representatives ? CftpMode::representatives : CftpMode::straightforward;
  py::gil_scoped_release release;
  for (auto& s : out) s = cftp::cftp(chain, rng, step_cap, mode).state;
  return out;
}

py::dict run_command(const std::string& command, const std::map<std::string, std::string>& params,
                     std::size_t threads, const std::string& out_dir) {
  xprmt::Config cfg(command);
  for (const auto& [k, v] : params) cfg.set(k, v);
  cfg.set_threads(threads);
  xprmt::Output out;
  {
    py::gil_scoped_release release;
    out = xprmt::run(cfg);
  }
  if (!out_dir.empty()) xprmt::write_output(out, cfg, out_dir);
  py::dict tables;
  for (const auto& t : out.tables) {
    py::list rows;
    for (const auto& r : t.rows) rows.append(py::cast(r));
    tables[py::str(t.name)] = py::make_tuple(t.columns, rows);
  }
  py::dict result;
  result["summary"] = out.summary;
  result["tables"] = tables;
  result["config_hash"] = cfg.hash();
  return result;
}

}  // namespace

PYBIND11_MODULE(_cftp, m) {
  m.doc() = "Exact stationary sampling, average-reward estimators and apprenticeship learning";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NotErgodicError>(m, "NotErgodicError", PyExc_ValueError);
  py::register_exception<StepCapExceeded>(m, "StepCapExceeded", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("derive_seed", [](std::uint64_t parent, const std::vector<std::uint64_t>& path) {
    return derive_seed(parent, std::span<const std::uint64_t>(path));
  }, py::arg("parent"), py::arg("path"));

  py::enum_<RewardMode>(m, "RewardMode")
      .value("bernoulli", RewardMode::bernoulli)
      .value("deterministic", RewardMode::deterministic);

  py::class_<MarkovChain>(m, "MarkovChain")
      .def(py::init<Eigen::MatrixXd>(), py::arg("transition"))
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, RewardMode>(), py::arg("transition"), py::arg("reward_mean"),
           py::arg("mode") = RewardMode::bernoulli)
      .def_property_readonly("n_states", &MarkovChain::n_states)
      .def_property_readonly("transition", &MarkovChain::transition)
      .def_property_readonly("reward_mean", &MarkovChain::reward_mean)
      .def_property_readonly("is_ergodic", &MarkovChain::is_ergodic);

  py::class_<TabularMDP>(m, "TabularMDP")
      .def(py::init<std::vector<Eigen::MatrixXd>, Eigen::MatrixXd, Eigen::MatrixXd, RewardMode>(),
           py::arg("transitions"), py::arg("reward_mean"), py::arg("features") = Eigen::MatrixXd(),
           py::arg("mode") = RewardMode::bernoulli)
      .def_property_readonly("n_states", &TabularMDP::n_states)
      .def_property_readonly("n_actions", &TabularMDP::n_actions)
      .def_property_readonly("n_features", &TabularMDP::n_features)
      .def_property_readonly("transitions", &TabularMDP::transitions)
      .def_property_readonly("reward_mean", &TabularMDP::reward_mean)
      .def_property_readonly("features", &TabularMDP::features);

  m.def("example_chain", &example_chain);
  m.def("lower_bound_chain", &lower_bound_chain, py::arg("n_states"), py::arg("epsilon"));
  m.def("random_ergodic_chain", [](std::size_t n, std::size_t support, std::uint64_t seed) {
    Rng rng(seed);
    return random_ergodic_chain(n, support, rng);
  }, py::arg("n_states"), py::arg("support"), py::arg("seed"));
  m.def("random_mdp", [](std::size_t n, std::size_t a, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    return random_mdp(n, a, k, rng);
  }, py::arg("n_states"), py::arg("n_actions"), py::arg("n_features"), py::arg("seed"));

  m.def("stationary_distribution", &stationary_distribution);
  m.def("mixing_time", &mixing_time, py::arg("chain"), py::arg("cap") = 1'000'000);
  m.def("average_reward", py::overload_cast<const MarkovChain&>(&average_reward));
  m.def("policy_average_reward", [](const TabularMDP& mdp, const std::vector<std::size_t>& actions) {
    return average_reward(mdp, Policy(DeterministicPolicy(actions)));
  }, py::arg("mdp"), py::arg("actions"));
  m.def("optimal_policy", [](const TabularMDP& mdp) {
    const PlanningResult r = optimal_policy(mdp);
    return py::make_tuple(r.policy.actions(), r.rho);
  });

  m.def("stationary_samples", &stationary_samples, py::arg("chain"), py::arg("n"), py::arg("seed"),
        py::arg("step_cap") = 100'000'000, py::arg("representatives") = false,
        "n independent exact draws from the stationary distribution by coupling from the past");

  m.def("delta_rho_samples", [](const TabularMDP& mdp, const std::vector<std::size_t>& pi,
                                const std::vector<std::size_t>& pi_prime, std::size_t n, std::uint64_t seed) {
    const DeltaRhoSampler sampler(mdp, DeterministicPolicy(pi), DeterministicPolicy(pi_prime), StartSource::cftp,
                                  100'000'000);
    Rng rng(seed);
    std::vector<double> out(n);
    py::gil_scoped_release release;
    for (auto& v : out) v = sampler.sample(rng).value;
    return out;
  }, py::arg("mdp"), py::arg("pi"), py::arg("pi_prime"), py::arg("n"), py::arg("seed"),
     "samples of rho(pi_prime) - rho(pi)");

  m.def("hedge_weights", [](const std::vector<Eigen::VectorXd>& losses, double beta) {
    if (losses.empty()) throw ValidationError("hedge_weights: need at least one loss vector");
    HedgeState h(static_cast<std::size_t>(losses.front().size()), beta);
    for (const auto& c : losses) h = hedge_step(h, c);
    return h.weights();
  }, py::arg("losses"), py::arg("beta"));

  m.def("mwal", [](const TabularMDP& mdp, const Eigen::MatrixXd& expert_probs, std::size_t T, std::size_t m_samples,
                   std::uint64_t seed) {
    ExpertModel expert(StochasticPolicy(expert_probs), derive_seed(seed, {1}));
    const MwalResult r = mwal(mdp, expert, mdp.n_features(), T, m_samples, derive_seed(seed, {2}));
    const Eigen::VectorXd phi = feature_expectations_exact(mdp, r.mixture);
    const Eigen::VectorXd ephi = feature_expectations_exact(mdp, Policy(StochasticPolicy(expert_probs)));
    return py::make_tuple(phi, worst_case_margin(phi, ephi));
  }, py::arg("mdp"), py::arg("expert_probs"), py::arg("T"), py::arg("m"), py::arg("seed"),
     "returns (feature expectations of the learned mixture, worst-case margin over the expert)");

  m.def("game_value", [](const TabularMDP& mdp, const Eigen::MatrixXd& expert_probs) {
    return game_value_oracle(mdp, StochasticPolicy(expert_probs), mdp.n_features()).value;
  }, py::arg("mdp"), py::arg("expert_probs"));

  m.def("ensemble_size", &ensemble_size, py::arg("epsilon"), py::arg("delta"), py::arg("n_policies"));

  m.def("run", &run_command, py::arg("command"), py::arg("params") = std::map<std::string, std::string>{},
        py::arg("threads") = 1, py::arg("out_dir") = std::string(),
        "runs an experiment subcommand; returns summary, tables and the config hash");
}
