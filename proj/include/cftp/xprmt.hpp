#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace cftp::xprmt {

/// Resolved key=value parameters of one experiment. Values are kept as
/// text; typed getters validate on read. Flags override file entries.
class Config {
 public:
  explicit Config(std::string command = {}) : command_(std::move(command)) {}

  const std::string& command() const noexcept { return command_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Lines `key = value`; blank lines and `#` comments are skipped. Keys
  /// already present are kept, so flags set beforehand win.
  void merge_file(const std::string& path);
  void merge_text(const std::string& text);

  /// Fills missing keys from `defaults` and rejects keys not listed there.
  void resolve(const std::map<std::string, std::string>& defaults);

  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

  /// `command = ...` followed by the sorted parameters, one per line.
  std::string echo() const;
  /// FNV-1a of echo().
  std::uint64_t hash() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  /// Worker count; not part of the resolved parameters, since outputs must
  /// not depend on it.
  std::size_t threads() const noexcept { return threads_; }
  void set_threads(std::size_t n) noexcept { threads_ = n == 0 ? 1 : n; }

 private:
  std::string command_;
  std::size_t threads_ = 1;
  std::map<std::string, std::string> values_;
};

struct Table {
  std::string name;  ///< file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::size_t column(const std::string& name) const;
  /// Header row and data rows; the first line is `# config <hash> <command>`.
  std::string to_csv(std::uint64_t config_hash, const std::string& command) const;
};

/// Compact, deterministic number formatting for CSV cells (%.10g; "nan"/"inf").
std::string num(double v);
std::string num(std::size_t v);

struct Output {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> figures;  ///< file name, SVG text
  std::map<std::string, double> summary;
};

/// Writes config.txt, every table as <name>.csv and every figure.
void write_output(const Output& out, const Config& config, const std::string& dir);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// 10, 20, 50, 100, ... up to `top` (inclusive); `top` is appended when it
/// is not on the grid. Starts at `start`.
std::vector<std::size_t> log_grid(std::size_t start, std::size_t top);

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

Output run_example(Config& config);
Output run_coalescence(Config& config);
Output run_mwal(Config& config);
Output run_mwal_gen(Config& config);
Output run_pg(Config& config);
Output run_eval_store(Config& config);

/// Dispatch by subcommand name; throws ValidationError for unknown names.
Output run(Config& config);
/// The CSV files each subcommand writes, with their columns, for --help.
std::string schema_help(const std::string& command);

}  // namespace cftp::xprmt
