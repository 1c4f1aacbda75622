#ifndef PROXUC_LINALG_HPP
#define PROXUC_LINALG_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "proxuc/vec.hpp"

namespace proxuc::linalg {

using Mat = std::vector<Vec>;  // row-major, dense, tiny (n <= ~20)

// Gaussian elimination with partial pivoting; nullopt when the pivot
// collapses relative to the matrix scale.
inline std::optional<Vec> solve(Mat A, Vec b) {
  const std::size_t n = b.size();
  double scale = 1e-300;
  for (const auto& row : A)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    if (std::fabs(A[piv][c]) < 1e-13 * scale) return std::nullopt;
    std::swap(A[piv], A[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      double m = A[r][c] / A[c][c];
      if (m == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) A[r][k] -= m * A[c][k];
      b[r] -= m * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

inline Vec mat_vec(const Mat& A, const Vec& x) {
  Vec r(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) r[i] += A[i][j] * x[j];
  return r;
}

}  // namespace proxuc::linalg

#endif
