#include "lrsm/io.hpp"

#include "lrsm/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lrsm::io {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ArgumentError("csv: cannot parse number '" + t + "'");
  }
  if (used != t.size()) throw ArgumentError("csv: trailing characters in '" + t + "'");
  return v;
}

long long parse_int(const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ArgumentError("csv: cannot parse integer '" + t + "'");
  return v;
}

bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!trim(line).empty()) return true;
  }
  return false;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_dense(std::ostream& os, const DenseMatrix& m) {
  os << m.rows() << ',' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

DenseMatrix read_dense(std::istream& is) {
  std::string line;
  if (!next_content_line(is, line)) throw ArgumentError("csv: missing 'rows,cols' header");
  auto header = split_commas(line);
  if (header.size() != 2) throw ArgumentError("csv: header must be 'rows,cols'");
  const long long rows = parse_int(header[0]);
  const long long cols = parse_int(header[1]);
  if (rows <= 0 || cols <= 0) throw ArgumentError("csv: dimensions must be positive");
  DenseMatrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!next_content_line(is, line))
      throw ArgumentError("csv: expected " + std::to_string(rows) + " rows");
    auto fields = split_commas(line);
    if (static_cast<long long>(fields.size()) != cols)
      throw ArgumentError("csv: row " + std::to_string(i) + " has wrong column count");
    for (long long j = 0; j < cols; ++j) m(i, j) = parse_double(fields[static_cast<std::size_t>(j)]);
  }
  if (next_content_line(is, line)) throw ArgumentError("csv: extra rows after matrix body");
  require_finite(m, "csv");
  return m;
}

void save_dense(const std::string& path, const DenseMatrix& m) {
  auto out = open_out(path);
  write_dense(out, m);
  if (!out) throw IoError("write failed for '" + path + "'");
}

DenseMatrix load_dense(const std::string& path) {
  auto in = open_in(path);
  return read_dense(in);
}

void write_sparse(std::ostream& os, const SparseEntrySet& s) {
  for (const auto& e : s.entries()) os << e.row << ',' << e.col << ',' << format_double(e.value) << '\n';
}

SparseEntrySet read_sparse(std::istream& is, Index rows, Index cols) {
  std::vector<SparseEntry> entries;
  std::string line;
  while (next_content_line(is, line)) {
    auto f = split_commas(line);
    if (f.size() != 3) throw ArgumentError("csv: sparse lines must be 'i,j,value'");
    entries.push_back({static_cast<Index>(parse_int(f[0])), static_cast<Index>(parse_int(f[1])),
                       parse_double(f[2])});
  }
  return SparseEntrySet(rows, cols, std::move(entries));
}

void save_sparse(const std::string& path, const SparseEntrySet& s) {
  auto out = open_out(path);
  write_sparse(out, s);
  if (!out) throw IoError("write failed for '" + path + "'");
}

SparseEntrySet load_sparse(const std::string& path, Index rows, Index cols) {
  auto in = open_in(path);
  return read_sparse(in, rows, cols);
}

void write_states(std::ostream& os, const std::vector<std::int64_t>& states) {
  for (auto s : states) os << s << '\n';
}

std::vector<std::int64_t> read_states(std::istream& is) {
  std::vector<std::int64_t> out;
  std::string line;
  while (next_content_line(is, line)) out.push_back(parse_int(line));
  return out;
}

std::string read_text_file(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace lrsm::io
