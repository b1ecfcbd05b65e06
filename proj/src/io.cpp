#include "symregg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace symregg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, const char* what, std::size_t row) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InputError(std::string("bad ") + what + " '" + std::string(s) + "'", row);
  }
  return v;
}

}  // namespace

InputError::InputError(const std::string& what, std::size_t row, std::size_t column)
    : std::runtime_error([&] {
        std::string where;
        if (row > 0) where += "row " + std::to_string(row);
        if (column > 0) where += (where.empty() ? "" : ", ") + std::string("column ") + std::to_string(column);
        return where.empty() ? what : where + ": " + what;
      }()),
      row_(row),
      column_(column) {}

Dataset read_csv(std::istream& in, const std::string& target) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    for (auto f : split_fields(line, ',')) header.emplace_back(trim(f));
    break;
  }
  if (header.empty()) throw InputError("empty file");

  std::size_t target_col = header.size() - 1;
  if (!target.empty()) {
    auto it = std::find(header.begin(), header.end(), target);
    if (it == header.end()) {
      std::string names;
      for (const auto& h : header) names += (names.empty() ? "" : ", ") + h;
      throw InputError("target column '" + target + "' not found (columns: " + names + ")");
    }
    target_col = static_cast<std::size_t>(it - header.begin());
  }
  if (header.size() < 2) throw InputError("need at least one variable column and a target column", row);

  std::vector<std::vector<double>> columns(header.size() - 1);
  std::vector<double> y;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j != target_col) names.push_back(header[j]);
  }
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, ',');
    if (fields.size() != header.size()) {
      throw InputError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()),
                       row);
    }
    std::size_t var = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      auto cell = trim(fields[j]);
      auto v = parse_double(cell);
      if (!v) throw InputError("non-numeric value '" + std::string(cell) + "'", row, j + 1);
      if (!std::isfinite(*v)) throw InputError("non-finite value '" + std::string(cell) + "'", row, j + 1);
      if (j == target_col) {
        y.push_back(*v);
      } else {
        columns[var++].push_back(*v);
      }
    }
  }
  if (y.empty()) throw InputError("no data rows");
  return Dataset(std::move(columns), std::move(y), std::move(names));
}

Dataset load_csv(const std::string& path, const std::string& target) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return read_csv(in, target);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "# eval_index\tmethod\tsize\ttrain_loss\tval_loss\texpression\tparams\n";
  for (const auto& r : trace) {
    out << r.eval_index << '\t' << method_name(r.method) << '\t' << r.size << '\t' << format_double(r.train_loss)
        << '\t' << format_double(r.val_loss) << '\t' << r.expr << '\t';
    for (std::size_t i = 0; i < r.params.size(); ++i) out << (i ? "," : "") << format_double(r.params[i]);
    out << '\n';
  }
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_trace(out, trace);
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line.front() == '#') continue;
    auto f = split_fields(line, '\t');
    if (f.size() != 7) throw InputError("expected 7 tab-separated fields, found " + std::to_string(f.size()), row);
    TraceRecord r;
    r.eval_index = parse_int<std::uint64_t>(f[0], "eval_index", row);
    try {
      r.method = method_from_name(f[1]);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what(), row, 2);
    }
    r.size = parse_int<int>(f[2], "size", row);
    auto loss_field = [&](std::string_view s, std::size_t col) {
      auto v = parse_double(s);
      if (!v) throw InputError("bad loss '" + std::string(s) + "'", row, col);
      return *v;
    };
    r.train_loss = loss_field(f[3], 4);
    r.val_loss = loss_field(f[4], 5);
    r.expr = std::string(f[5]);
    if (!f[6].empty()) {
      for (auto p : split_fields(f[6], ',')) {
        auto v = parse_double(p);
        if (!v) throw InputError("bad parameter '" + std::string(p) + "'", row, 7);
        r.params.push_back(*v);
      }
    }
    trace.push_back(std::move(r));
  }
  return trace;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_trace(in);
}

}  // namespace symregg
