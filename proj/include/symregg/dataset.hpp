#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace symregg {

/// Immutable n x d design matrix plus target. Storage is shared between
/// copies, so passing a Dataset by value never copies the numbers.
class Dataset {
 public:
  Dataset() = default;
  /// `columns[j]` holds variable j for every row. Throws std::invalid_argument
  /// on ragged input, n = 0, d = 0 or non-finite values.
  Dataset(std::vector<std::vector<double>> columns, std::vector<double> y,
          std::vector<std::string> names = {});

  /// Builds from row-major samples.
  static Dataset from_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& y);

  std::size_t rows() const { return storage_ ? storage_->n : 0; }
  std::size_t vars() const { return storage_ ? storage_->d : 0; }
  std::span<const double> column(std::size_t j) const {
    return {storage_->x.data() + j * storage_->n, storage_->n};
  }
  std::span<const double> target() const { return storage_->y; }
  const std::vector<std::string>& names() const { return storage_->names; }
  double at(std::size_t i, std::size_t j) const { return storage_->x[j * storage_->n + i]; }

  Dataset subset(std::span<const std::size_t> row_ids) const;
  bool same_storage(const Dataset& other) const { return storage_ == other.storage_; }

 private:
  struct Storage {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> x;  // column-major
    std::vector<double> y;
    std::vector<std::string> names;
  };
  std::shared_ptr<const Storage> storage_;
};

}  // namespace symregg
