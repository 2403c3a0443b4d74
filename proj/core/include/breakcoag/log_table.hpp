#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace breakcoag {

// Symmetric function of two positive volumes tabulated on a square
// rectangular grid and interpolated bilinearly in (log x, log y).
class LogTable2D {
public:
  // values[i * nodes.size() + j] is the value at (nodes[i], nodes[j]).
  LogTable2D(std::vector<double> nodes, std::vector<double> values);

  // Reads a CSV with columns `x,y,<value_column>` covering every (x, y) node
  // pair. Both axes must use the same node set.
  static LogTable2D from_csv(const std::filesystem::path& path, const std::string& value_column);

  // Average of the interpolant at (x, y) and (y, x). Throws DomainError
  // outside [nodes.front(), nodes.back()]^2.
  double operator()(double x, double y) const;

  double lo() const noexcept { return nodes_.front(); }
  double hi() const noexcept { return nodes_.back(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double min_value() const;
  double max_value() const;
  // Smallest tabulated value among nodes that influence the interpolant on
  // (0, cut)^2.
  double min_below(double cut) const;

private:
  double interpolate(double x, double y) const;

  std::vector<double> nodes_;
  std::vector<double> log_nodes_;
  std::vector<double> values_;
};

}  // namespace breakcoag
