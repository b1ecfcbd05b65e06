#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "symregg/dataset.hpp"
#include "symregg/search.hpp"

namespace symregg {

/// Input error with a location. `row` is the 1-based line in the file (the
/// header is row 1), `column` the 1-based field; 0 when not applicable.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& what, std::size_t row = 0, std::size_t column = 0);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Reads a comma separated file with a header row. `target` names the
/// column that becomes y (empty: the last column); every other column is a
/// variable, in header order.
Dataset read_csv(std::istream& in, const std::string& target = "");
Dataset load_csv(const std::string& path, const std::string& target = "");

/// Tab separated, one record per line:
/// eval_index, method, size, train_loss, val_loss, expression, params
/// (comma separated). Numbers use the shortest text that reads back to the
/// same double. A leading '#' line names the columns.
void write_trace(std::ostream& out, const Trace& trace);
void save_trace(const std::string& path, const Trace& trace);
Trace read_trace(std::istream& in);
Trace load_trace(const std::string& path);

std::string format_double(double v);

}  // namespace symregg
