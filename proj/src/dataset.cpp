#include "symregg/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace symregg {

Dataset::Dataset(std::vector<std::vector<double>> columns, std::vector<double> y,
                 std::vector<std::string> names) {
  if (columns.empty()) throw std::invalid_argument("dataset needs at least one variable");
  if (y.empty()) throw std::invalid_argument("dataset needs at least one row");
  auto s = std::make_shared<Storage>();
  s->n = y.size();
  s->d = columns.size();
  s->x.reserve(s->n * s->d);
  for (const auto& col : columns) {
    if (col.size() != s->n) throw std::invalid_argument("ragged dataset columns");
    for (double v : col) {
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in dataset");
      s->x.push_back(v);
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite target value in dataset");
  }
  s->y = std::move(y);
  if (names.empty()) {
    for (std::size_t j = 0; j < s->d; ++j) names.push_back("x" + std::to_string(j));
  }
  s->names = std::move(names);
  storage_ = std::move(s);
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  if (rows.empty()) throw std::invalid_argument("dataset needs at least one row");
  std::vector<std::vector<double>> cols(rows.front().size());
  for (const auto& r : rows) {
    if (r.size() != cols.size()) throw std::invalid_argument("ragged dataset rows");
    for (std::size_t j = 0; j < r.size(); ++j) cols[j].push_back(r[j]);
  }
  return Dataset(std::move(cols), y);
}

Dataset Dataset::subset(std::span<const std::size_t> row_ids) const {
  std::vector<std::vector<double>> cols(vars());
  std::vector<double> y;
  y.reserve(row_ids.size());
  for (auto& c : cols) c.reserve(row_ids.size());
  for (std::size_t i : row_ids) {
    if (i >= rows()) throw std::out_of_range("row index out of range");
    for (std::size_t j = 0; j < vars(); ++j) cols[j].push_back(at(i, j));
    y.push_back(storage_->y[i]);
  }
  return Dataset(std::move(cols), std::move(y), names());
}

}  // namespace symregg
