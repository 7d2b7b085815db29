#include "prom/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little, "binary artifact format assumes a little-endian host");

namespace prom::io {

namespace {

std::string to_hex(const unsigned char* d, unsigned n) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(2 * n);
  for (unsigned i = 0; i < n; ++i) {
    s.push_back(digits[d[i] >> 4]);
    s.push_back(digits[d[i] & 15]);
  }
  return s;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const fs::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ConfigError("truncated file " + path.string());
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  return is;
}

}  // namespace

std::string sha256_hex(const void* data, std::size_t bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned len = 0;
  if (EVP_Digest(data, bytes, md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw NumericError("SHA-256 digest failed");
  }
  return to_hex(md.data(), len);
}

std::string sha256_string(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string sha256_file(const fs::path& path) {
  const std::string text = read_text(path);
  return sha256_string(text);
}

std::string fingerprint(const MatrixXd& m) {
  std::vector<unsigned char> buf(2 * sizeof(std::uint64_t) + sizeof(double) * static_cast<std::size_t>(m.size()));
  const std::uint64_t rows = static_cast<std::uint64_t>(m.rows()), cols = static_cast<std::uint64_t>(m.cols());
  std::memcpy(buf.data(), &rows, sizeof rows);
  std::memcpy(buf.data() + sizeof rows, &cols, sizeof cols);
  if (m.size()) std::memcpy(buf.data() + 2 * sizeof rows, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  return sha256_hex(buf.data(), buf.size()).substr(0, 16);
}

void write_matrix(const fs::path& path, const MatrixXd& m) {
  auto os = open_out(path);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!os) throw ConfigError("failed writing " + path.string());
}

MatrixXd read_matrix(const fs::path& path) {
  auto is = open_in(path);
  const auto rows = get<std::uint64_t>(is, path);
  const auto cols = get<std::uint64_t>(is, path);
  MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  if (!is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()))) {
    throw ConfigError("truncated matrix file " + path.string());
  }
  return m;
}

void write_load_history(const fs::path& path, const LoadHistory<double>& h) {
  auto os = open_out(path);
  put<double>(os, h.dt);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(h.steps()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(h.dofs()));
  put<std::uint64_t>(os, h.seed);
  os.write(reinterpret_cast<const char*>(h.samples.data()),
           static_cast<std::streamsize>(sizeof(double) * h.samples.size()));
  if (!os) throw ConfigError("failed writing " + path.string());
}

LoadHistory<double> read_load_history(const fs::path& path) {
  auto is = open_in(path);
  LoadHistory<double> h;
  h.dt = get<double>(is, path);
  const auto steps = get<std::uint64_t>(is, path);
  const auto dofs = get<std::uint64_t>(is, path);
  h.seed = get<std::uint64_t>(is, path);
  h.samples.resize(static_cast<Index>(steps), static_cast<Index>(dofs));
  if (!is.read(reinterpret_cast<char*>(h.samples.data()),
               static_cast<std::streamsize>(sizeof(double) * h.samples.size()))) {
    throw ConfigError("truncated load history " + path.string());
  }
  return h;
}

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw ConfigError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  auto is = open_in(path);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace prom::io
