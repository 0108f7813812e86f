#include "jcpot/harness/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "jcpot/error.hpp"

namespace jcpot::harness {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view cell, std::size_t line) {
  T value{};
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    parse_error(line, "non-numeric cell '" + std::string(cell) + "'");
  }
  return value;
}

// Shortest representation that parses back to the same double.
std::string format_double(double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

}  // namespace

LabeledDataset read_labeled_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) parse_error(line_no == 0 ? 1 : line_no, "missing header");

  const auto header = split(line);
  const std::size_t dim = header.size() - 1;
  if (header.size() < 2 || header.back() != "label") {
    parse_error(line_no, "header must be f0,...,f{d-1},label");
  }
  for (std::size_t c = 0; c < dim; ++c) {
    if (header[c] != "f" + std::to_string(c)) {
      parse_error(line_no, "expected column f" + std::to_string(c) + ", found '" +
                               std::string(header[c]) + "'");
    }
  }

  std::vector<double> values;
  LabeledDataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      parse_error(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                               std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < dim; ++c) values.push_back(parse_number<double>(cells[c], line_no));
    const int label = parse_number<int>(cells.back(), line_no);
    if (label < -1) parse_error(line_no, "label must be >= -1");
    data.labels.push_back(label);
  }

  const auto rows = static_cast<Index>(data.labels.size());
  data.points.resize(rows, static_cast<Index>(dim));
  for (Index i = 0; i < rows; ++i) {
    for (Index d = 0; d < static_cast<Index>(dim); ++d) {
      data.points(i, d) = values[static_cast<std::size_t>(i) * dim + static_cast<std::size_t>(d)];
    }
  }
  return data;
}

LabeledDataset load_labeled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kParse, "cannot open " + path);
  try {
    return read_labeled_csv(in);
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

void write_labeled_csv(std::ostream& out, const LabeledDataset& data) {
  for (Index d = 0; d < data.dim(); ++d) out << 'f' << d << ',';
  out << "label\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index d = 0; d < data.dim(); ++d) out << format_double(data.points(i, d)) << ',';
    out << data.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

void save_labeled_csv(const std::string& path, const LabeledDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kInvalidInput, "cannot write " + path);
  write_labeled_csv(out, data);
}

void write_predictions_csv(std::ostream& out, const Prediction& prediction) {
  out << "index,pred_label";
  for (Index c = 0; c < prediction.scores.rows(); ++c) out << ",score_c" << c;
  out << '\n';
  for (std::size_t j = 0; j < prediction.labels.size(); ++j) {
    out << j << ',' << prediction.labels[j];
    for (Index c = 0; c < prediction.scores.rows(); ++c) {
      out << ',' << format_double(prediction.scores(c, static_cast<Index>(j)));
    }
    out << '\n';
  }
}

}  // namespace jcpot::harness
