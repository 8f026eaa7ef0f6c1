#include "cftp/text_format.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "cftp/errors.hpp"

namespace cftp {

std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_exact(m(i, j));
    }
    os << '\n';
  }
}

std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw ValidationError(std::string("text format: unexpected end of input reading ") + what);
  return tok;
}

void expect_keyword(std::istream& is, const char* kw) {
  const std::string tok = next_token(is, kw);
  if (tok != kw) throw ValidationError("text format: expected '" + std::string(kw) + "', got '" + tok + "'");
}

std::size_t read_count(std::istream& is, const char* what) {
  const std::string tok = next_token(is, what);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') throw ValidationError("text format: bad count '" + tok + "'");
  return static_cast<std::size_t>(v);
}

double read_real(std::istream& is) {
  const std::string tok = next_token(is, "matrix entry");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw ValidationError("text format: bad number '" + tok + "'");
  return v;
}

Eigen::MatrixXd read_matrix(std::istream& is, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = read_real(is);
  return m;
}

}  // namespace

void write_mdp(std::ostream& os, const TabularMDP& mdp) {
  os << "states " << mdp.n_states() << " actions " << mdp.n_actions() << " features " << mdp.n_features() << '\n';
  for (const auto& p : mdp.transitions()) write_matrix(os, p);
  write_matrix(os, mdp.reward_mean());
  write_matrix(os, mdp.features());
  os << "reward " << (mdp.reward_mode() == RewardMode::bernoulli ? "bernoulli" : "deterministic") << '\n';
}

TabularMDP read_mdp(std::istream& is) {
  expect_keyword(is, "states");
  const std::size_t n = read_count(is, "states");
  expect_keyword(is, "actions");
  const std::size_t m = read_count(is, "actions");
  expect_keyword(is, "features");
  const std::size_t k = read_count(is, "features");
  if (n == 0 || m == 0) throw ValidationError("text format: states and actions must be positive");

  std::vector<Eigen::MatrixXd> transitions;
  transitions.reserve(m);
  for (std::size_t a = 0; a < m; ++a) transitions.push_back(read_matrix(is, n, n));
  Eigen::MatrixXd rewards = read_matrix(is, n, m);
  Eigen::MatrixXd features = read_matrix(is, n, k);

  RewardMode mode = RewardMode::bernoulli;
  std::string tok;
  if (is >> tok) {
    if (tok != "reward") throw ValidationError("text format: unexpected trailing token '" + tok + "'");
    const std::string kind = next_token(is, "reward mode");
    if (kind == "bernoulli") mode = RewardMode::bernoulli;
    else if (kind == "deterministic") mode = RewardMode::deterministic;
    else throw ValidationError("text format: unknown reward mode '" + kind + "'");
  }
  return TabularMDP(std::move(transitions), std::move(rewards), std::move(features), mode);
}

void write_chain(std::ostream& os, const MarkovChain& chain) { write_mdp(os, TabularMDP::from_chain(chain)); }

MarkovChain read_chain(std::istream& is) {
  const TabularMDP mdp = read_mdp(is);
  if (mdp.n_actions() != 1) throw ValidationError("text format: chain documents have exactly one action");
  return MarkovChain(mdp.transition(0), mdp.reward_mean().col(0), mdp.reward_mode());
}

void save_mdp(const std::string& path, const TabularMDP& mdp) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_mdp(os, mdp);
}

TabularMDP load_mdp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_mdp(is);
}

}  // namespace cftp
