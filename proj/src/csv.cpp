#include "experts/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "experts/error.hpp"

namespace experts {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw DataError(fmt::format("line {}: '{}' is not a number", line_no, s));
  }
  return v;
}

std::size_t parse_index(const std::string& s, std::size_t line_no) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("line {}: '{}' is not an index", line_no, s));
  }
  return v;
}

std::optional<std::size_t> column_suffix(const std::string& name,
                                         const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return {};
  std::size_t k = 0;
  const char* b = name.data() + prefix.size();
  const char* e = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(b, e, k);
  if (ec != std::errc() || ptr != e) return {};
  return k;
}

struct Header {
  std::vector<std::string> names;
  std::vector<std::size_t> loss_cols;  // position of loss_k at index k
  std::vector<std::size_t> prob_cols;
};

Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV: missing header row");
  Header h;
  h.names = split_csv_line(line);
  std::vector<std::optional<std::size_t>> loss, prob;
  for (std::size_t c = 0; c < h.names.size(); ++c) {
    for (auto [prefix, slot] : {std::pair{"loss_", &loss}, std::pair{"prob_", &prob}}) {
      if (auto k = column_suffix(h.names[c], prefix)) {
        if (slot->size() <= *k) slot->resize(*k + 1);
        (*slot)[*k] = c;
      }
    }
  }
  auto collect = [](const auto& cols, const char* what) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (!cols[k]) throw DataError(fmt::format("CSV: column {}{} missing", what, k));
      out.push_back(*cols[k]);
    }
    return out;
  };
  h.loss_cols = collect(loss, "loss_");
  h.prob_cols = collect(prob, "prob_");
  return h;
}

std::size_t find_column(const Header& h, const std::string& name) {
  for (std::size_t c = 0; c < h.names.size(); ++c)
    if (h.names[c] == name) return c;
  throw DataError(fmt::format("CSV: column '{}' missing", name));
}

}  // namespace

std::string format_real(double x) { return fmt::format("{}", x); }

void write_records_csv(std::ostream& out, std::span<const RoundRecord> records) {
  const std::size_t n = records.empty() ? 0 : records.front().losses.size();
  std::string header = "t,chosen,expected_cost,algorithm_cost";
  for (std::size_t i = 0; i < n; ++i) header += fmt::format(",loss_{}", i);
  for (std::size_t i = 0; i < n; ++i) header += fmt::format(",prob_{}", i);
  out << header << '\n';
  for (const auto& r : records) {
    std::string line = fmt::format("{},{},{},{}", r.t, r.chosen.index,
                                   r.expected_cost, r.algorithm_cost);
    for (double l : r.losses) line += fmt::format(",{}", l);
    for (double p : r.distribution.probs()) line += fmt::format(",{}", p);
    out << line << '\n';
  }
}

std::vector<RoundRecord> read_records_csv(std::istream& in) {
  const Header h = read_header(in);
  if (h.loss_cols.size() != h.prob_cols.size()) {
    throw DataError("CSV: loss and prob column counts differ");
  }
  const std::size_t t_col = find_column(h, "t");
  const std::size_t chosen_col = find_column(h, "chosen");
  const std::size_t exp_col = find_column(h, "expected_cost");
  const std::size_t alg_col = find_column(h, "algorithm_cost");

  std::vector<RoundRecord> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != h.names.size()) {
      throw DataError(fmt::format("line {}: expected {} cells, got {}", line_no,
                                  h.names.size(), cells.size()));
    }
    RoundRecord r;
    r.t = parse_index(cells[t_col], line_no);
    r.chosen = ExpertId(parse_index(cells[chosen_col], line_no));
    r.expected_cost = parse_real(cells[exp_col], line_no);
    r.algorithm_cost = parse_real(cells[alg_col], line_no);
    for (std::size_t c : h.loss_cols) r.losses.push_back(parse_real(cells[c], line_no));
    std::vector<double> probs;
    for (std::size_t c : h.prob_cols) probs.push_back(parse_real(cells[c], line_no));
    r.distribution = ChoiceDistribution(std::move(probs));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::vector<double>> read_loss_columns(std::istream& in) {
  const Header h = read_header(in);
  if (h.loss_cols.empty()) throw DataError("CSV: no loss_k columns");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != h.names.size()) {
      throw DataError(fmt::format("line {}: expected {} cells, got {}", line_no,
                                  h.names.size(), cells.size()));
    }
    std::vector<double> row;
    row.reserve(h.loss_cols.size());
    for (std::size_t c : h.loss_cols) row.push_back(parse_real(cells[c], line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> read_loss_columns(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return read_loss_columns(in);
}

void write_loss_table(std::ostream& out,
                      const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  std::string header = "t";
  for (std::size_t i = 0; i < n; ++i) header += fmt::format(",loss_{}", i);
  out << header << '\n';
  for (std::size_t t = 0; t < rows.size(); ++t) {
    std::string line = fmt::format("{}", t + 1);
    for (double v : rows[t]) line += fmt::format(",{}", v);
    out << line << '\n';
  }
}

}  // namespace experts
