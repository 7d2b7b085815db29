#pragma once

#include "prom/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace prom {

/// ||Qh - Qr|| / ||Qh|| over the column-major flattening. With `literal`
/// the denominator is sqrt(Qh^T Qr) instead; a negative inner product
/// under the root is reported as an error.
template <typename DA, typename DB>
double relative_error(const Eigen::MatrixBase<DA>& q_hfm, const Eigen::MatrixBase<DB>& q_rom,
                      bool literal = false) {
  require(q_hfm.rows() == q_rom.rows() && q_hfm.cols() == q_rom.cols(),
          "relative_error needs fields of equal shape");
  const double num = (q_hfm - q_rom).norm();
  if (literal) {
    const double ip = (q_hfm.array() * q_rom.array()).sum();
    if (!(ip > 0)) throw NumericError("relative_error: Q_hfm^T Q_rom is not positive");
    return num / std::sqrt(ip);
  }
  const double den = q_hfm.norm();
  if (!(den > 0)) throw NumericError("relative_error: reference field is identically zero");
  return num / den;
}

inline double speedup(double hfm_wall_s, double rom_wall_s) {
  require(hfm_wall_s > 0 && rom_wall_s > 0, "speed-up needs positive wall times");
  return hfm_wall_s / rom_wall_s;
}

struct ComparisonReport {
  std::string variant;
  std::string query;     ///< parameter point
  Index subdomain = -1;
  Index order = 0;
  double re_u = 0;
  double re_rf = 0;
  double re_sigma = 0;
  Index mesh_elements = 0;  ///< elements evaluated online
  Index total_elements = 0;
  double hfm_wall_s = 0;
  double rom_wall_s = 0;
  double speedup = 0;
};

struct ErrorSummary {
  std::size_t count = 0;
  double mean_re_u = 0, max_re_u = 0;
  double mean_re_rf = 0, max_re_rf = 0;
  double mean_re_sigma = 0, max_re_sigma = 0;
};

inline ErrorSummary summarize(const std::vector<ComparisonReport>& rows) {
  ErrorSummary s;
  s.count = rows.size();
  if (rows.empty()) return s;
  for (const auto& r : rows) {
    s.mean_re_u += r.re_u;
    s.mean_re_rf += r.re_rf;
    s.mean_re_sigma += r.re_sigma;
    s.max_re_u = std::max(s.max_re_u, r.re_u);
    s.max_re_rf = std::max(s.max_re_rf, r.re_rf);
    s.max_re_sigma = std::max(s.max_re_sigma, r.re_sigma);
  }
  const double n = static_cast<double>(rows.size());
  s.mean_re_u /= n;
  s.mean_re_rf /= n;
  s.mean_re_sigma /= n;
  return s;
}

}  // namespace prom
