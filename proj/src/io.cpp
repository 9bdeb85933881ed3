#include "pogamp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pogamp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

double parse_double_strict(const std::string& field, long line, long column) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + field + "'", line, column);
  }
  if (pos != field.size())
    throw ParseError("trailing characters in number: '" + field + "'", line, column);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Dataset load_dataset(const std::string& path, const Domain& domain) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset file", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x,y,value")
    throw ParseError("expected header 'x,y,value', got '" + line + "'", 1, 1);

  Dataset d;
  std::vector<double> values;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 3)
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), lineno, 1);
    const double x = parse_double_strict(fields[0], lineno, 1);
    const double y = parse_double_strict(fields[1], lineno, 2);
    const double v = parse_double_strict(fields[2], lineno, 3);
    const Site s{x, y};
    const long row = lineno - 1;
    if (!domain.contains(s))
      throw OutOfDomain("row " + std::to_string(row) + " outside the declared domain", row);
    for (std::size_t i = 0; i < d.obs_locs.size(); ++i)
      if (same_site(d.obs_locs[i], s))
        throw DuplicateLocation("row " + std::to_string(row) + " duplicates row " +
                                    std::to_string(i + 1),
                                row);
    d.obs_locs.append(s);
    values.push_back(v);
  }
  if (values.size() < 2) throw ConfigError("dataset needs at least 2 rows");
  d.y_o = Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return d;
}

void write_trace_csv(const std::string& path, const ChainOutput& chain) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace: " + path);
  out << "iteration";
  for (const auto& n : chain.param_names) out << ',' << n;
  out << ",n_events\n";
  for (Eigen::Index i = 0; i < chain.draws.rows(); ++i) {
    out << (i + 1);
    for (Eigen::Index j = 0; j < chain.draws.cols(); ++j)
      out << ',' << format_double(chain.draws(i, j));
    out << ',' << chain.n_trace[static_cast<std::size_t>(i)] << '\n';
  }
}

TraceData read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1, 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header.front() != "iteration" || header.back() != "n_events")
    throw ParseError("malformed trace header", 1, 1);

  TraceData t;
  t.param_names.assign(header.begin() + 1, header.end() - 1);
  std::vector<std::vector<double>> rows;
  std::vector<long> ns;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("trace row width mismatch", lineno, 1);
    std::vector<double> row;
    for (std::size_t j = 1; j + 1 < fields.size(); ++j)
      row.push_back(parse_double_strict(fields[j], lineno, static_cast<long>(j)));
    rows.push_back(std::move(row));
    ns.push_back(std::stol(fields.back()));
  }
  t.draws.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(t.param_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  t.n_trace = std::move(ns);
  return t;
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write csv: " + path);
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j == 0 ? "" : ",") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j == 0 ? "" : ",") << format_double(values(i, j));
    out << '\n';
  }
}

}  // namespace pogamp
