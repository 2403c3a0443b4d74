#include "breakcoag/log_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "breakcoag/csv.hpp"
#include "breakcoag/errors.hpp"

namespace breakcoag {

LogTable2D::LogTable2D(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() < 2) throw DataError("table: need at least two nodes per axis");
  if (values_.size() != nodes_.size() * nodes_.size()) throw DataError("table: value count mismatch");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > 0.0)) throw DataError("table: nodes must be positive");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw DataError("table: nodes must be strictly increasing");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("table: values must be finite");
  }
  log_nodes_.reserve(nodes_.size());
  for (double x : nodes_) log_nodes_.push_back(std::log(x));
}

LogTable2D LogTable2D::from_csv(const std::filesystem::path& path, const std::string& value_column) {
  const auto csv = read_csv(path);
  const auto ix = csv.column("x");
  const auto iy = csv.column("y");
  const auto iv = csv.column(value_column);
  std::map<std::pair<double, double>, double> cells;
  std::vector<double> xs, ys;
  for (const auto& row : csv.rows) {
    if (!cells.emplace(std::make_pair(row[ix], row[iy]), row[iv]).second) {
      throw DataError(path.string() + ": duplicate node (" + std::to_string(row[ix]) + ", " +
                      std::to_string(row[iy]) + ")");
    }
    xs.push_back(row[ix]);
    ys.push_back(row[iy]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  if (xs != ys) throw DataError(path.string() + ": x and y axes must use the same nodes");
  if (cells.size() != xs.size() * ys.size()) throw DataError(path.string() + ": table is not rectangular");

  std::vector<double> values(xs.size() * xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs.size(); ++j) values[i * xs.size() + j] = cells.at({xs[i], xs[j]});
  }
  return LogTable2D(std::move(xs), std::move(values));
}

double LogTable2D::interpolate(double x, double y) const {
  const std::size_t n = nodes_.size();
  auto bracket = [&](double v) {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), v);
    std::size_t k = (it == nodes_.end()) ? n - 2 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    const double t = (std::log(v) - log_nodes_[k]) / (log_nodes_[k + 1] - log_nodes_[k]);
    return std::make_pair(k, std::clamp(t, 0.0, 1.0));
  };
  const auto [i, tx] = bracket(x);
  const auto [j, ty] = bracket(y);
  const double v00 = values_[i * n + j];
  const double v01 = values_[i * n + j + 1];
  const double v10 = values_[(i + 1) * n + j];
  const double v11 = values_[(i + 1) * n + j + 1];
  return (1 - tx) * ((1 - ty) * v00 + ty * v01) + tx * ((1 - ty) * v10 + ty * v11);
}

double LogTable2D::operator()(double x, double y) const {
  if (!(x >= lo() && x <= hi() && y >= lo() && y <= hi())) {
    throw DomainError("table lookup at (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside [" + std::to_string(lo()) + ", " + std::to_string(hi()) + "]^2");
  }
  return 0.5 * (interpolate(x, y) + interpolate(y, x));
}

double LogTable2D::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double LogTable2D::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double LogTable2D::min_below(double cut) const {
  const std::size_t n = nodes_.size();
  // Nodes strictly below `cut` plus the first node at or above it.
  std::size_t last = static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), cut) - nodes_.begin());
  last = std::min(last, n - 1);
  double m = values_[0];
  for (std::size_t i = 0; i <= last; ++i) {
    for (std::size_t j = 0; j <= last; ++j) m = std::min(m, values_[i * n + j]);
  }
  return m;
}

}  // namespace breakcoag
