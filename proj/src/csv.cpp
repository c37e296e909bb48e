#include "autocore/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace autocore {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument("non-numeric cell at row " + std::to_string(row) +
                                ", column " + std::to_string(col));
  return value;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 Task task) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("empty file: " + path);
  const std::vector<std::string> header = split_line(line);

  std::ptrdiff_t label_index = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (trim(header[c]) == label_column) label_index = static_cast<std::ptrdiff_t>(c);
  const bool needs_labels = task_needs_labels(task);
  if (needs_labels && label_index < 0)
    throw std::invalid_argument("label column '" + label_column +
                                "' not found in " + path);

  std::vector<std::vector<double>> feature_rows;
  std::vector<std::string> raw_labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      ++row;
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::invalid_argument("row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
    std::vector<double> features;
    features.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_index) {
        raw_labels.push_back(trim(cells[c]));
      } else {
        features.push_back(parse_number(cells[c], row, c));
      }
    }
    feature_rows.push_back(std::move(features));
    ++row;
  }
  if (feature_rows.empty())
    throw std::invalid_argument("no data rows in " + path);

  const auto n = static_cast<Eigen::Index>(feature_rows.size());
  const auto d = static_cast<Eigen::Index>(feature_rows.front().size());
  Eigen::MatrixXd points(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      points(i, j) = feature_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  std::optional<Eigen::VectorXd> labels;
  if (label_index >= 0 && needs_labels) {
    labels = Eigen::VectorXd(n);
    if (task_is_classification(task)) {
      std::map<std::string, long> classes;
      for (const auto& raw : raw_labels) classes[raw]++;
      if (classes.size() != 2)
        throw std::invalid_argument("binary task needs exactly 2 label values, got " +
                                    std::to_string(classes.size()));
      const std::string negative = classes.begin()->first;  // lexicographically smaller
      for (Eigen::Index i = 0; i < n; ++i)
        (*labels)(i) = raw_labels[static_cast<std::size_t>(i)] == negative ? -1.0 : 1.0;
    } else {
      for (Eigen::Index i = 0; i < n; ++i)
        (*labels)(i) = parse_number(raw_labels[static_cast<std::size_t>(i)], i + 1,
                                    static_cast<std::size_t>(label_index));
    }
  }

  return make_dataset(std::move(points), std::move(labels), path);
}

void write_csv(const std::string& path, const Dataset& data,
               const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);

  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    if (j > 0) out << ',';
    out << 'f' << j;
  }
  if (data.has_labels()) out << ',' << label_column;
  out << '\n';

  char buf[40];
  auto print = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      if (j > 0) out << ',';
      print(data.points(i, j));
    }
    if (data.has_labels()) {
      out << ',';
      print(data.label(i));
    }
    out << '\n';
  }
}

}  // namespace autocore
