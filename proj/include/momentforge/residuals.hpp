#ifndef MOMENTFORGE_RESIDUALS_HPP
#define MOMENTFORGE_RESIDUALS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace momentforge {

/// Named residuals; adding a name twice keeps the larger value.
class Residuals {
 public:
  void add(const std::string& name, double r) {
    if (std::isnan(r)) r = std::numeric_limits<double>::infinity();
    for (auto& [n, v] : rows_)
      if (n == name) {
        v = std::max(v, r);
        return;
      }
    rows_.emplace_back(name, r);
  }

  void merge(const Residuals& o) {
    for (const auto& [n, v] : o.rows_) add(n, v);
  }

  double at(const std::string& name) const {
    for (const auto& [n, v] : rows_)
      if (n == name) return v;
    throw Error(ErrorKind::length, "no residual named " + name);
  }

  bool has(const std::string& name) const {
    return std::any_of(rows_.begin(), rows_.end(), [&](const auto& r) { return r.first == name; });
  }

  double max() const {
    double m = 0.0;
    for (const auto& r : rows_) m = std::max(m, r.second);
    return m;
  }

  const std::vector<std::pair<std::string, double>>& rows() const { return rows_; }

 private:
  std::vector<std::pair<std::string, double>> rows_;
};

}  // namespace momentforge

#endif  // MOMENTFORGE_RESIDUALS_HPP
