#include "ratmin/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ratmin/errors.hpp"

namespace ratmin {

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> split_line(const std::string& line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    out.push_back(parse_double(std::string_view(line).substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

template <typename T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

}  // namespace

DenseMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && blank(line)) {
  }
  if (!in && line.empty()) throw InvalidArgument("empty matrix file");
  const double kd = parse_double(line);
  if (!(kd >= 1.0) || kd != static_cast<double>(static_cast<std::size_t>(kd))) {
    throw InvalidArgument("matrix header must be a positive integer");
  }
  const auto k = static_cast<std::size_t>(kd);
  std::vector<double> data;
  data.reserve(k * k);
  std::size_t rows = 0;
  while (rows < k && std::getline(in, line)) {
    if (blank(line)) continue;
    std::vector<double> row = split_line(line);
    if (row.size() != k) {
      throw InvalidArgument("matrix row " + std::to_string(rows) + " has " +
                            std::to_string(row.size()) + " entries, expected " +
                            std::to_string(k));
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows != k) throw InvalidArgument("matrix file has too few rows");
  DenseMatrix m(k, std::move(data));
  if (!m.all_finite()) throw InvalidArgument("matrix has non-finite entries");
  return m;
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  char buf[32];
  out << m.dim() << '\n';
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) {
      if (j > 0) out << ',';
      const auto r = std::to_chars(buf, buf + sizeof(buf), m(i, j));
      out.write(buf, r.ptr - buf);
    }
    out << '\n';
  }
}

DenseMatrix read_matrix_bin(std::istream& in) {
  std::uint64_t k = 0;
  if (!in.read(reinterpret_cast<char*>(&k), sizeof(k))) {
    throw InvalidArgument("binary matrix header is truncated");
  }
  k = to_little_endian(k);
  if (k == 0 || k > (1u << 16)) throw InvalidArgument("implausible matrix dimension");
  std::vector<double> data(k * k);
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw InvalidArgument("binary matrix payload is truncated");
  }
  for (double& v : data) v = to_little_endian(v);
  DenseMatrix m(static_cast<std::size_t>(k), std::move(data));
  if (!m.all_finite()) throw InvalidArgument("matrix has non-finite entries");
  return m;
}

void write_matrix_bin(std::ostream& out, const DenseMatrix& m) {
  const std::uint64_t k = to_little_endian(static_cast<std::uint64_t>(m.dim()));
  out.write(reinterpret_cast<const char*>(&k), sizeof(k));
  for (double v : m.data()) {
    const double le = to_little_endian(v);
    out.write(reinterpret_cast<const char*>(&le), sizeof(le));
  }
}

DenseMatrix load_matrix(const std::filesystem::path& p) {
  const bool bin = p.extension() == ".bin";
  std::ifstream in(p, bin ? std::ios::binary : std::ios::in);
  if (!in) throw InvalidArgument("cannot open matrix file " + p.string());
  return bin ? read_matrix_bin(in) : read_matrix_csv(in);
}

void save_matrix(const std::filesystem::path& p, const DenseMatrix& m) {
  const bool bin = p.extension() == ".bin";
  std::ofstream out(p, bin ? std::ios::binary : std::ios::out);
  if (!out) throw InvalidArgument("cannot write matrix file " + p.string());
  if (bin) {
    write_matrix_bin(out, m);
  } else {
    write_matrix_csv(out, m);
  }
}

Vector read_vector_csv(std::istream& in) {
  Vector v;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    for (double x : split_line(line)) v.push_back(x);
  }
  return v;
}

Vector load_vector(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument("cannot open vector file " + p.string());
  return read_vector_csv(in);
}

}  // namespace ratmin
