#include "wavecore/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "wavecore/errors.hpp"

namespace wavecore {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated binary field file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

GridHeader header_of(const Grid& g) {
  GridHeader h;
  h.dims = g.dims();
  for (int a = 0; a < g.dims(); ++a) {
    h.n.push_back(g.n(a));
    h.len.push_back(g.length(a));
  }
  return h;
}

void put_header(std::ostream& os, const GridHeader& h) {
  put_u64(os, static_cast<std::uint64_t>(h.dims));
  for (auto v : h.n) put_u64(os, v);
  for (auto v : h.len) put_f64(os, v);
}

GridHeader get_header(std::istream& is) {
  GridHeader h;
  const auto d = get_u64(is);
  if (d != 1 && d != 2) throw std::runtime_error("binary field file: bad dimension count");
  h.dims = static_cast<int>(d);
  for (int a = 0; a < h.dims; ++a) h.n.push_back(get_u64(is));
  for (int a = 0; a < h.dims; ++a) h.len.push_back(get_f64(is));
  return h;
}

std::size_t count_of(const GridHeader& h) {
  std::size_t c = 1;
  for (auto v : h.n) c *= v;
  return c;
}

void put_values(std::ostream& os, const RField& f) {
  for (double v : f) put_f64(os, v);
}

RField get_values(std::istream& is, std::size_t n) {
  RField f(n);
  for (auto& v : f) v = get_f64(is);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

}  // namespace

void write_table_binary(const std::string& path, const GridHeader& h, const RField& values) {
  if (values.size() != count_of(h)) throw GridMismatch("table size does not match header");
  auto os = open_out(path);
  put_header(os, h);
  put_values(os, values);
}

void write_field_binary(const std::string& path, const Grid& g, const RField& f) {
  if (f.size() != g.size()) throw GridMismatch("field size does not match grid");
  write_table_binary(path, header_of(g), f);
}

RField read_field_binary(const std::string& path, GridHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  GridHeader h = get_header(is);
  RField f = get_values(is, count_of(h));
  if (header) *header = h;
  return f;
}

void write_csv_columns(const std::string& path, const std::vector<std::string>& names,
                       const std::vector<const RField*>& cols) {
  if (names.size() != cols.size() || cols.empty()) throw std::invalid_argument("csv: column/name mismatch");
  const std::size_t n = cols.front()->size();
  for (auto* c : cols)
    if (c->size() != n) throw std::invalid_argument("csv: ragged columns");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "," : "") << names[j];
  os << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) os << (j ? "," : "") << (*cols[j])[i];
    os << '\n';
  }
}

void write_checkpoint(const std::string& path, const Grid& g, const Checkpoint& c) {
  if (c.eta.size() != g.size() || c.phi.size() != g.size()) throw GridMismatch("checkpoint state size mismatch");
  auto os = open_out(path);
  put_f64(os, c.t);
  put_f64(os, c.dt);
  put_u64(os, c.scenario_hash);
  put_header(os, header_of(g));
  put_values(os, c.eta);
  put_values(os, c.phi);
}

Checkpoint read_checkpoint(const std::string& path, GridHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  Checkpoint c;
  c.t = get_f64(is);
  c.dt = get_f64(is);
  c.scenario_hash = get_u64(is);
  GridHeader h = get_header(is);
  c.eta = get_values(is, count_of(h));
  c.phi = get_values(is, count_of(h));
  if (header) *header = h;
  return c;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace wavecore
