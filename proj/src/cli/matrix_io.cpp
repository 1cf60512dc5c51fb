#include "fgvi/cli/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "fgvi/cli/table_writer.hpp"
#include "fgvi/errors.hpp"

namespace fgvi::cli {

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(long line, const std::string& message) {
  throw DomainError("matrix file line " + std::to_string(line) + ": " + message);
}

template <typename T>
T parse_number(const std::string& tok, long line) {
  T value{};
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) fail(line, "cannot parse '" + tok + "' as a number");
  return value;
}

}  // namespace

Matrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("matrix file is empty");
  const auto head = tokens(line);
  if (head.size() != 1) fail(1, "expected the dimension alone on the first line");
  const long n = parse_number<long>(head[0], 1);
  if (n < 1) fail(1, "dimension must be positive");

  Matrix m(n, n);
  long line_no = 1;
  for (long row = 0; row < n; ++row) {
    ++line_no;
    if (!std::getline(in, line)) fail(line_no, "expected " + std::to_string(n) + " rows");
    const auto fields = tokens(line);
    if (static_cast<long>(fields.size()) != n) {
      fail(line_no, "expected " + std::to_string(n) + " values, found " +
                        std::to_string(fields.size()));
    }
    for (long col = 0; col < n; ++col) m(row, col) = parse_number<double>(fields[col], line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!tokens(line).empty()) fail(line_no, "unexpected content after the last row");
  }
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open matrix file " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write matrix file " + path);
  write_matrix(out, m);
}

}  // namespace fgvi::cli
