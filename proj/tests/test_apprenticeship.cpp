#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cftp/apprenticeship.hpp"
#include "cftp/errors.hpp"
#include "cftp/generators.hpp"
#include "cftp/hedge.hpp"
#include "cftp/solvers.hpp"
#include "support/oracles.hpp"

using namespace cftp;

namespace {

Eigen::VectorXd phi_oracle(const TabularMDP& mdp, const Eigen::MatrixXd& probs) {
  return mdp.features().transpose() * oracle::stationary(oracle::induced(mdp.transitions(), probs));
}

Eigen::MatrixXd probs_of(const DeterministicPolicy& pi, std::size_t n_actions) {
  return oracle::one_hot(pi.actions(), n_actions);
}

/// Self-play Hedge on the finite game: the w player minimizes w' G psi, the
/// policy player maximizes it. Returns [lower, upper], an interval that holds
/// the game value.
std::pair<double, double> self_play_bounds(const Eigen::MatrixXd& g, std::size_t rounds) {
  const auto k = static_cast<std::size_t>(g.rows());
  const auto n = static_cast<std::size_t>(g.cols());
  HedgeState row = HedgeState::start(k, rounds);
  HedgeState col = HedgeState::start(n, rounds);
  Eigen::VectorXd w_sum = Eigen::VectorXd::Zero(g.rows());
  Eigen::VectorXd psi_sum = Eigen::VectorXd::Zero(g.cols());
  for (std::size_t t = 0; t < rounds; ++t) {
    const Eigen::VectorXd w = row.weights();
    const Eigen::VectorXd psi = col.weights();
    w_sum += w;
    psi_sum += psi;
    row = hedge_step(row, rescale_loss(g * psi, 1.0).values);
    col = hedge_step(col, rescale_loss(-(g.transpose() * w), 1.0).values);
  }
  const Eigen::VectorXd w_bar = w_sum / static_cast<double>(rounds);
  const Eigen::VectorXd psi_bar = psi_sum / static_cast<double>(rounds);
  return {(g * psi_bar).minCoeff(), (g.transpose() * w_bar).maxCoeff()};
}

// Two states; phi = (1, 1) on the first state and 0 on the second. Action 0 is
// the uniform row everywhere; action 1 in state 0 stays with probability 2/3,
// so the policy (1, *) puts mass 0.6 on state 0 against 0.5 for the expert.
TabularMDP dominance_mdp() {
  Eigen::MatrixXd p0(2, 2), p1(2, 2), f(2, 2);
  p0 << 0.5, 0.5, 0.5, 0.5;
  p1 << 2.0 / 3.0, 1.0 / 3.0, 0.5, 0.5;
  f << 1, 1, 0, 0;
  return TabularMDP({p0, p1}, Eigen::MatrixXd::Zero(2, 2), f);
}

}  // namespace

TEST_CASE("expert model") {
  Eigen::MatrixXd probs(2, 2);
  probs << 0.3, 0.7, 1.0, 0.0;
  ExpertModel a(StochasticPolicy(probs), 5), b(StochasticPolicy(probs), 5);
  std::size_t ones = 0;
  for (int i = 0; i < 20000; ++i) {
    const std::size_t x = a.query(0);
    REQUIRE(x == b.query(0));
    ones += x;
    REQUIRE(a.query(1) == 0);
    b.query(1);
  }
  CHECK(a.ledger().expert_calls() == 40000);
  CHECK(a.ledger().generative_calls() == 0);
  CHECK(std::fabs(static_cast<double>(ones) / 20000.0 - 0.7) <= 3.0 * std::sqrt(0.21 / 20000.0));
}

TEST_CASE("exact feature expectations") {
  SUBCASE("constant features") {
    Rng gen(1);
    const TabularMDP base = random_mdp(4, 2, 0, gen);
    const TabularMDP mdp(base.transitions(), base.reward_mean(), Eigen::MatrixXd::Constant(4, 2, 0.25));
    for (const auto& pi : enumerate_policies(mdp)) {
      CHECK((feature_expectations_exact(mdp, pi).array() - 0.25).abs().maxCoeff() < 1e-14);
    }
  }
  SUBCASE("example chain with the left indicator") {
    const TabularMDP mdp = TabularMDP::from_chain(example_chain(), (Eigen::MatrixXd(2, 1) << 1, 0).finished());
    CHECK(feature_expectations_exact(mdp, DeterministicPolicy::constant(2, 0))[0] == doctest::Approx(2.0 / 3.0));
  }
  SUBCASE("random MDP against a long trajectory") {
    Rng gen(2);
    const TabularMDP mdp = random_mdp(4, 2, 3, gen);
    const StochasticPolicy pi = StochasticPolicy::uniform(4, 2);
    const Eigen::VectorXd exact = feature_expectations_exact(mdp, pi);
    CHECK((exact - phi_oracle(mdp, pi.probs())).cwiseAbs().maxCoeff() < 1e-10);
    std::vector<oracle::Moments> batches(3);
    Rng rng(3);
    std::size_t s = 0;
    for (int b = 0; b < 1000; ++b) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
      for (int i = 0; i < 1000; ++i) {
        acc += mdp.features().row(static_cast<Eigen::Index>(s)).transpose();
        s = mdp.sample_next(s, pi.sample(s, rng), rng);
      }
      for (std::size_t j = 0; j < 3; ++j) batches[j].add(acc[static_cast<Eigen::Index>(j)] / 1000.0);
    }
    for (std::size_t j = 0; j < 3; ++j) CHECK(oracle::within_se(batches[j], exact[static_cast<Eigen::Index>(j)]));
  }
  SUBCASE("mixed policies are linear") {
    Rng gen(4);
    const TabularMDP mdp = random_mdp(3, 2, 2, gen);
    const auto pols = enumerate_policies(mdp);
    const MixedPolicy mix({pols[0], pols[3], pols[5]}, {0.2, 0.5, 0.3});
    const Eigen::VectorXd expect = 0.2 * phi_oracle(mdp, probs_of(pols[0], 2)) + 0.5 * phi_oracle(mdp, probs_of(pols[3], 2)) +
                                   0.3 * phi_oracle(mdp, probs_of(pols[5], 2));
    CHECK((feature_expectations_exact(mdp, mix) - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("no features") {
    const TabularMDP mdp = TabularMDP::from_chain(example_chain());
    CHECK_THROWS_AS(feature_expectations_exact(mdp, DeterministicPolicy::constant(2, 0)), ValidationError);
  }
}

TEST_CASE("feature sample size") {
  CHECK(feature_sample_size(2, 0.1, 0.05) == 877);
  CHECK(feature_sample_size(2, 0.1, 0.1) == static_cast<std::size_t>(std::ceil(200.0 * std::log(40.0))));
  CHECK_THROWS_AS(feature_sample_size(2, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(feature_sample_size(2, 0.1, 1.0), ValidationError);
}

TEST_CASE("expert feature estimates") {
  SUBCASE("single state, m = 1") {
    const TabularMDP mdp({Eigen::MatrixXd::Ones(1, 1)}, Eigen::MatrixXd::Zero(1, 1),
                         (Eigen::MatrixXd(1, 2) << 0.3, 0.8).finished());
    GenerativeModel dyn(mdp, 1);
    ExpertModel expert(StochasticPolicy::uniform(1, 1), 2);
    const ExpertFeatureEstimate est = estimate_expert_features(dyn, expert, 1);
    CHECK(est.phi[0] == 0.3);
    CHECK(est.phi[1] == 0.8);
    CHECK(est.cftp_steps == 1);
  }
  SUBCASE("Hoeffding-sized estimates are eps-accurate") {
    Rng gen(5);
    const TabularMDP mdp = random_mdp(4, 2, 2, gen);
    const StochasticPolicy pe = StochasticPolicy::uniform(4, 2);
    const Eigen::VectorXd exact = phi_oracle(mdp, pe.probs());
    const std::size_t m = feature_sample_size(2, 0.1, 0.05);
    int good = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
      GenerativeModel dyn(mdp, derive_seed(6, {r, 0}));
      ExpertModel expert(pe, derive_seed(6, {r, 1}));
      const ExpertFeatureEstimate est = estimate_expert_features(dyn, expert, m);
      good += (est.phi - exact).cwiseAbs().maxCoeff() <= 0.1;
      // Each drawn map entry costs one expert query and one transition.
      REQUIRE(expert.ledger().expert_calls() == est.cftp_steps * 4);
      REQUIRE(dyn.ledger().generative_calls() == est.cftp_steps * 4);
    }
    CHECK(good >= 190);
  }
  SUBCASE("deterministic expert samples follow the stationary distribution") {
    Rng gen(7);
    const TabularMDP mdp = random_mdp(5, 2, 1, gen);
    const DeterministicPolicy pi({1, 0, 0, 1, 1});
    GenerativeModel dyn(mdp, 8);
    ExpertModel expert(StochasticPolicy::from_deterministic(pi, 2), 9);
    const ExpertFeatureEstimate est = estimate_expert_features(dyn, expert, 20000);
    std::vector<std::size_t> counts(5, 0);
    for (std::size_t s : est.states) ++counts[s];
    CHECK(oracle::chi_square_pvalue(counts, oracle::stationary(oracle::induced(mdp.transitions(), probs_of(pi, 2)))) > 0.001);
  }
  SUBCASE("validation") {
    const TabularMDP mdp = TabularMDP::from_chain(example_chain());
    GenerativeModel dyn(mdp, 1);
    ExpertModel expert(StochasticPolicy::uniform(2, 1), 2);
    CHECK_THROWS_AS(estimate_expert_features(dyn, expert, 5), ValidationError);
  }
}

TEST_CASE("mwal with one feature") {
  Rng gen(10);
  const TabularMDP mdp = random_mdp(3, 2, 1, gen);
  ExpertModel expert(StochasticPolicy::uniform(3, 2), 11);
  const MwalResult res = mwal(mdp, expert, 1, 50, 100, 12);
  const DeterministicPolicy best = optimal_policy(mdp, Eigen::VectorXd(mdp.features().col(0))).policy;
  REQUIRE(res.rounds.size() == 50);
  for (const auto& r : res.rounds) {
    CHECK(r.w.size() == 1);
    CHECK(r.w[0] == 1.0);
    CHECK(r.policy == best);
  }
  const double learner = feature_expectations_exact(mdp, res.mixture)[0];
  CHECK(learner >= phi_oracle(mdp, expert.policy().probs())[0]);
  CHECK(res.ledger.expert_calls() == expert.ledger().expert_calls());
}

TEST_CASE("mwal invariants and the adversarial-reward check") {
  Rng gen(13);
  const TabularMDP mdp = random_mdp(4, 2, 2, gen);
  const StochasticPolicy pe = StochasticPolicy::uniform(4, 2);
  ExpertModel expert(pe, 14);
  const double eps = 0.1;
  const std::size_t T = static_cast<std::size_t>(std::ceil(144.0 / (eps * eps) * std::log(2.0)));
  const std::size_t m = static_cast<std::size_t>(std::ceil(18.0 / (eps * eps) * std::log(40.0)));
  const MwalResult res = mwal(mdp, expert, 2, T, m, 15);
  REQUIRE(res.rounds.size() == T);
  Eigen::VectorXd mean_phi = Eigen::VectorXd::Zero(2);
  for (const auto& r : res.rounds) {
    REQUIRE(r.loss.minCoeff() >= 0.0);
    REQUIRE(r.loss.maxCoeff() <= 1.0);
    CHECK(std::fabs(r.w.sum() - 1.0) < 1e-12);
    mean_phi += phi_oracle(mdp, probs_of(r.policy, 2));
  }
  mean_phi /= static_cast<double>(T);
  for (double w : res.mixture.weights()) REQUIRE(std::fabs(w - 1.0 / static_cast<double>(T)) < 1e-12);
  CHECK((feature_expectations_exact(mdp, res.mixture) - mean_phi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(res.loss_bound == 1.0);
  CHECK(res.ledger.generative_calls() > 0);
  CHECK(res.ledger.expert_calls() == res.ledger.generative_calls());

  const double v = game_value_oracle(mdp, pe, 2).value;
  const Eigen::VectorXd expert_phi = phi_oracle(mdp, pe.probs());
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    const double l = rng.uniform();
    const Eigen::Vector2d w(l, 1.0 - l);
    CHECK(w.dot(mean_phi) - w.dot(expert_phi) >= v - eps);
  }
}

TEST_CASE("game column samples") {
  SUBCASE("expert as the learner gives mean zero") {
    Rng gen(17);
    const TabularMDP mdp = random_mdp(4, 2, 2, gen);
    const DeterministicPolicy pi({0, 1, 1, 0});
    GenerativeModel dyn(mdp, 18);
    ExpertModel expert(StochasticPolicy::from_deterministic(pi, 2), 19);
    const GameColumnSampler sampler(mdp, pi, 1'000'000);
    std::vector<oracle::Moments> m(2);
    for (int i = 0; i < 20000; ++i) {
      const GameColumnEstimate g = sampler.sample(dyn, expert);
      for (std::size_t j = 0; j < 2; ++j) m[j].add(g.g[static_cast<Eigen::Index>(j)]);
    }
    CHECK(oracle::within_se(m[0], 0.0));
    CHECK(oracle::within_se(m[1], 0.0));
  }
  SUBCASE("single state") {
    const TabularMDP mdp({Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1)}, Eigen::MatrixXd::Zero(1, 2),
                         (Eigen::MatrixXd(1, 2) << 0.4, 0.9).finished());
    GenerativeModel dyn(mdp, 1);
    ExpertModel expert(StochasticPolicy::uniform(1, 2), 2);
    const GameColumnEstimate g = game_column_sample(mdp, dyn, expert, DeterministicPolicy::constant(1, 1), 10);
    CHECK(g.t_c == 1);
    CHECK(g.g.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.calls == 2);
  }
  SUBCASE("random instances are unbiased") {
    Rng gen(20);
    for (int inst = 0; inst < 2; ++inst) {
      const TabularMDP mdp = random_mdp(4, 2, 2, gen);
      const StochasticPolicy pe = StochasticPolicy::uniform(4, 2);
      const auto pols = enumerate_policies(mdp);
      const DeterministicPolicy pi = pols[gen.below(pols.size())];
      const Eigen::VectorXd exact = phi_oracle(mdp, probs_of(pi, 2)) - phi_oracle(mdp, pe.probs());
      GenerativeModel dyn(mdp, derive_seed(21, {static_cast<std::uint64_t>(inst)}));
      ExpertModel expert(pe, derive_seed(22, {static_cast<std::uint64_t>(inst)}));
      const GameColumnSampler sampler(mdp, pi, 1'000'000);
      std::vector<oracle::Moments> m(2);
      for (int i = 0; i < 100000; ++i) {
        const GameColumnEstimate g = sampler.sample(dyn, expert);
        for (std::size_t j = 0; j < 2; ++j) m[j].add(g.g[static_cast<Eigen::Index>(j)]);
      }
      for (std::size_t j = 0; j < 2; ++j) CHECK(oracle::within_se(m[j], exact[static_cast<Eigen::Index>(j)]));
    }
  }
}

TEST_CASE("mwal_generative") {
  Rng gen(23);
  const TabularMDP mdp = random_mdp(3, 2, 1, gen);
  ExpertModel expert(StochasticPolicy::uniform(3, 2), 24);
  const MwalResult res = mwal_generative(mdp, expert, 1, 40, 0.1, 1.0, 25);
  const DeterministicPolicy best = optimal_policy(mdp, Eigen::VectorXd(mdp.features().col(0))).policy;
  for (const auto& r : res.rounds) {
    CHECK(r.w[0] == 1.0);
    CHECK(r.policy == best);
    CHECK(r.loss.minCoeff() >= 0.0);
    CHECK(r.loss.maxCoeff() <= 1.0);
  }
  CHECK(res.loss_bound == doctest::Approx(std::log(2.0 * 40.0 / 0.1)));
  CHECK(feature_expectations_exact(mdp, res.mixture)[0] >= phi_oracle(mdp, expert.policy().probs())[0]);

  // Reproducible for a fixed seed pair.
  ExpertModel e1(StochasticPolicy::uniform(3, 2), 24);
  const MwalResult again = mwal_generative(mdp, e1, 1, 40, 0.1, 1.0, 25);
  for (std::size_t t = 0; t < 40; ++t) CHECK(again.rounds[t].loss == res.rounds[t].loss);

  CHECK_THROWS_AS(mwal_generative(mdp, expert, 1, 40, 0.1, 0.0, 25), ValidationError);
  CHECK_THROWS_AS(mwal_generative(mdp, expert, 2, 40, 0.1, 1.0, 25), ValidationError);
  CHECK_THROWS_AS(mwal_generative(mdp, expert, 1, 0, 0.1, 1.0, 25), ValidationError);
}

TEST_CASE("game value oracle") {
  SUBCASE("expert optimal for every feature") {
    Rng gen(26);
    const TabularMDP base = random_mdp(3, 2, 1, gen);
    Eigen::MatrixXd f(3, 2);
    f << base.features(), base.features();
    const TabularMDP mdp(base.transitions(), base.reward_mean(), f);
    const DeterministicPolicy best = optimal_policy(mdp, Eigen::VectorXd(f.col(0))).policy;
    const GameValue v = game_value_oracle(mdp, StochasticPolicy::from_deterministic(best, 2), 2);
    CHECK(std::fabs(v.value) < 1e-10);
    CHECK(v.matrix.maxCoeff() <= 1e-10);
  }
  SUBCASE("a dominating policy lifts v* to 0.1") {
    const TabularMDP mdp = dominance_mdp();
    const GameValue v = game_value_oracle(mdp, StochasticPolicy::from_deterministic(DeterministicPolicy({0, 0}), 2), 2);
    CHECK(v.value >= 0.1 - 1e-12);
    CHECK(v.value == doctest::Approx(0.1));
  }
  SUBCASE("minimax equality and the grid oracle for k = 2") {
    Rng gen(27);
    for (int i = 0; i < 20; ++i) {
      const TabularMDP mdp = random_mdp(3, 2, 2, gen);
      Eigen::MatrixXd probs(3, 2);
      for (Eigen::Index s = 0; s < 3; ++s) {
        const double p = gen.uniform();
        probs.row(s) << p, 1.0 - p;
      }
      const GameValue v = game_value_oracle(mdp, StochasticPolicy(probs), 2);
      CHECK(std::fabs(v.value - v.maximin) < 1e-8);
      CHECK(v.resolution == 0.0);
      const double grid = oracle::grid_minmax(v.matrix.row(0).transpose(), v.matrix.row(1).transpose(), 100000);
      CHECK(v.value <= grid + 1e-12);
      CHECK(v.value >= grid - 1e-4);
      CHECK(std::fabs(v.w.sum() - 1.0) < 1e-12);
      CHECK((v.w.transpose() * v.matrix).maxCoeff() == doctest::Approx(v.value).epsilon(1e-12));
    }
  }
  SUBCASE("self-play Hedge brackets the value") {
    Rng gen(28);
    for (std::size_t k : {2u, 3u}) {
      const TabularMDP mdp = random_mdp(3, 2, k, gen);
      const GameValue v = game_value_oracle(mdp, StochasticPolicy::uniform(3, 2), k);
      const std::size_t rounds = 1'000'000;
      const auto [lo, hi] = self_play_bounds(v.matrix, rounds);
      CHECK(lo <= v.value + v.resolution + 1e-9);
      CHECK(v.value <= hi + 1e-9);
      // Payoffs span [-1, 1], so each player's average regret is at most
      // 2 * 2 sqrt(log n / rounds).
      const double gap = 4.0 * (std::sqrt(std::log(static_cast<double>(k)) / rounds) +
                                std::sqrt(std::log(static_cast<double>(v.matrix.cols())) / rounds));
      CHECK(hi - lo <= 2.0 * gap);
      if (k == 3) {
        CHECK(std::isnan(v.maximin));
        CHECK(v.resolution < 1e-8);
      }
    }
  }
  SUBCASE("k = 1 and errors") {
    Rng gen(29);
    const TabularMDP mdp = random_mdp(3, 2, 1, gen);
    const GameValue v = game_value_oracle(mdp, StochasticPolicy::uniform(3, 2), 1);
    CHECK(v.value == v.matrix.maxCoeff());
    const TabularMDP big = random_mdp(9, 2, 2, gen);
    CHECK_THROWS_AS(game_value_oracle(big, StochasticPolicy::uniform(9, 2), 2), ValidationError);
    CHECK_THROWS_AS(game_value_oracle(mdp, StochasticPolicy::uniform(3, 2), 2), ValidationError);
  }
  CHECK(worst_case_margin(Eigen::Vector2d(0.5, 0.2), Eigen::Vector2d(0.3, 0.3)) == doctest::Approx(-0.1));
}
