#pragma once

#include <string>

#include "cftp/xprmt.hpp"

namespace cftp::xprmt {

struct ChartSpec {
  std::string title;
  std::string x_column;
  std::string y_column;
  std::string err_column;     ///< optional; drawn as +-1 bars
  std::string series_column;  ///< optional; one polyline per distinct value
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Line chart of a table. Reads only the table's cells, so the figure is a
/// function of the CSV it plots. Non-finite or non-positive (on log axes)
/// points are skipped.
std::string line_chart(const Table& table, const ChartSpec& spec);

}  // namespace cftp::xprmt
