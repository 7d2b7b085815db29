#pragma once

// Artifact persistence. Matrices are stored as
//   uint64 rows | uint64 cols | rows*cols float64, column-major
// all little-endian. Metadata lives in JSON sidecars.

#include "prom/excitation.hpp"
#include "prom/types.hpp"

#include <cstddef>
#include <filesystem>
#include <string>

namespace prom::io {

namespace fs = std::filesystem;

std::string sha256_hex(const void* data, std::size_t bytes);
std::string sha256_file(const fs::path& path);
std::string sha256_string(const std::string& s);

/// Content fingerprint of a dense matrix (shape and values).
std::string fingerprint(const MatrixXd& m);

void write_matrix(const fs::path& path, const MatrixXd& m);
MatrixXd read_matrix(const fs::path& path);

/// Load histories carry their own header: float64 dt | uint64 steps |
/// uint64 dofs | uint64 seed, followed by the steps x dofs payload.
void write_load_history(const fs::path& path, const LoadHistory<double>& h);
LoadHistory<double> read_load_history(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace prom::io
