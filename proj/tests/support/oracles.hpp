#pragma once

// Reference implementations written directly from the definitions, sharing no
// code with the library: an explicit Haar basis, a dense per-stage analysis
// matrix for arbitrary filters, and brute-force thresholding estimators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace nsdwav::oracle {

using Matrix = std::vector<std::vector<double>>;  // row-major, rows = basis vectors

// Orthonormal Haar basis of R^n in pyramid order: scaling functions at level
// j0, then wavelets (j, k) for j = j0..J-1, k = 0..2^j-1.
inline Matrix haar_basis(std::size_t n, int j0) {
  int J = 0;
  while ((std::size_t{1} << J) < n) ++J;
  Matrix rows;
  const auto support = [&](int j) { return n >> j; };
  for (std::size_t k = 0; k < (std::size_t{1} << j0); ++k) {
    std::vector<double> v(n, 0.0);
    const std::size_t w = support(j0);
    for (std::size_t m = k * w; m < (k + 1) * w; ++m) v[m] = 1.0 / std::sqrt(static_cast<double>(w));
    rows.push_back(v);
  }
  for (int j = j0; j < J; ++j) {
    for (std::size_t k = 0; k < (std::size_t{1} << j); ++k) {
      std::vector<double> v(n, 0.0);
      const std::size_t w = support(j);
      const double amp = 1.0 / std::sqrt(static_cast<double>(w));
      for (std::size_t m = k * w; m < k * w + w / 2; ++m) v[m] = amp;
      for (std::size_t m = k * w + w / 2; m < (k + 1) * w; ++m) v[m] = -amp;
      rows.push_back(v);
    }
  }
  return rows;
}

// Full pyramid transform matrix for taps h (lowpass) under periodic wrap,
// built by composing dense per-stage matrices. Row order matches haar_basis.
inline Matrix filter_bank_basis(std::span<const double> h, std::size_t n, int j0) {
  const std::size_t L = h.size();
  std::vector<double> g(L);
  for (std::size_t k = 0; k < L; ++k) g[k] = ((k % 2) ? -1.0 : 1.0) * h[L - 1 - k];
  // current: rows express the running approximation in terms of x.
  Matrix current(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) current[i][i] = 1.0;
  std::vector<Matrix> details;  // finest first
  std::size_t size = n;
  int level = 0;
  while ((std::size_t{1} << level) < n) ++level;
  while (level > j0) {
    Matrix approx(size / 2, std::vector<double>(n, 0.0));
    Matrix detail(size / 2, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < size / 2; ++j) {
      for (std::size_t k = 0; k < L; ++k) {
        const std::size_t src = (2 * j + k) % size;
        for (std::size_t c = 0; c < n; ++c) {
          approx[j][c] += h[k] * current[src][c];
          detail[j][c] += g[k] * current[src][c];
        }
      }
    }
    details.push_back(detail);
    current = approx;
    size /= 2;
    --level;
  }
  Matrix rows = current;
  for (auto it = details.rbegin(); it != details.rend(); ++it) rows.insert(rows.end(), it->begin(), it->end());
  return rows;
}

inline std::vector<double> project(const Matrix& basis, std::span<const double> x) {
  std::vector<double> c(basis.size(), 0.0);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    for (std::size_t m = 0; m < x.size(); ++m) c[r] += basis[r][m] * x[m];
  }
  return c;
}

inline std::vector<double> synthesize(const Matrix& basis, std::span<const double> c) {
  std::vector<double> x(basis.front().size(), 0.0);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    for (std::size_t m = 0; m < x.size(); ++m) x[m] += c[r] * basis[r][m];
  }
  return x;
}

inline double first_difference_variance(std::span<const double> y) {
  double s = 0.0;
  for (std::size_t m = 1; m < y.size(); ++m) s += (y[m] - y[m - 1]) * (y[m] - y[m - 1]);
  return s / (2.0 * static_cast<double>(y.size() - 1));
}

inline int log2_floor(std::size_t n) {
  int J = 0;
  while ((std::size_t{2} << J) <= n) ++J;
  return J;
}

// Smallest i with 2^i >= target, searched directly.
inline int smallest_level_reaching(double target) {
  int i = 0;
  while (std::ldexp(1.0, i) < target) ++i;
  return i;
}

struct Schedule {
  int coarse;
  int cutoff;
  std::size_t block_len;
};

inline Schedule schedule(std::size_t n, double s) {
  const double nd = static_cast<double>(n);
  const int J = log2_floor(n);
  // n^{1/(2s+1)} compared on the log2 scale to absorb pow() rounding.
  int coarse = 0;
  while (static_cast<double>(coarse) < static_cast<double>(J) / (2 * s + 1) - 1e-12) ++coarse;
  return {std::min(coarse, J), std::min(smallest_level_reaching(nd / std::log(nd)), J),
          static_cast<std::size_t>(std::max(1.0, std::round(std::log(nd))))};
}

// Level of row r of a pyramid basis with coarse level j0 (-1 for scaling rows),
// and its position within that level.
inline std::pair<int, std::size_t> row_level(std::size_t r, int j0) {
  const std::size_t scaling = std::size_t{1} << j0;
  if (r < scaling) return {-1, r};
  std::size_t offset = r - scaling;
  int j = j0;
  while (offset >= (std::size_t{1} << j)) {
    offset -= std::size_t{1} << j;
    ++j;
  }
  return {j, offset};
}

// Term-by-term hard threshold in the explicit basis.
inline std::vector<double> term_estimate(const Matrix& basis, std::span<const double> y, double s) {
  const std::size_t n = y.size();
  const double nd = static_cast<double>(n);
  const Schedule sch = schedule(n, s);
  const double lambda = std::sqrt(2.0 * first_difference_variance(y) * std::log(nd) / nd);
  std::vector<double> scaled(y.begin(), y.end());
  for (double& v : scaled) v /= std::sqrt(nd);
  auto c = project(basis, scaled);
  for (std::size_t r = 0; r < c.size(); ++r) {
    const auto [level, pos] = row_level(r, sch.coarse);
    if (level < 0) continue;
    if (level > sch.cutoff || std::abs(c[r]) <= lambda) c[r] = 0.0;
  }
  auto fit = synthesize(basis, c);
  for (double& v : fit) v *= std::sqrt(nd);
  return fit;
}

// Local variance for a block covering [first, last) at `level`: nearest
// design point to the block's midpoint, periodic window of width w.
inline double local_variance(std::span<const double> y, int level, std::size_t first, std::size_t last) {
  const std::size_t n = y.size();
  const double centre = (static_cast<double>(first) + static_cast<double>(last)) / 2.0 /
                        std::ldexp(1.0, level);
  std::size_t best = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    const double d = std::abs(static_cast<double>(m) / static_cast<double>(n) - centre);
    const double bd = std::abs(static_cast<double>(best) / static_cast<double>(n) - centre);
    if (d < bd - 1e-15 || std::abs(d - bd) <= 1e-15) best = m;  // ties go to the later point
  }
  // A midpoint of 0 (only possible for an empty level) would map to x = 1 = x_n.
  std::size_t w = std::max<std::size_t>(16, n >> level);
  w = std::clamp<std::size_t>(w, 1, n);
  if (w < 2) return 0.0;
  // Window of w consecutive samples (periodically) whose (w/2)-th entry, 0-based,
  // is the design point.
  std::vector<double> window(w);
  const long long start = static_cast<long long>(best) - 1 - static_cast<long long>(w / 2);
  for (std::size_t t = 0; t < w; ++t) {
    const long long idx = ((start + static_cast<long long>(t)) % static_cast<long long>(n) +
                           static_cast<long long>(n)) % static_cast<long long>(n);
    window[t] = y[static_cast<std::size_t>(idx)];
  }
  return first_difference_variance(window);
}

// Block threshold in the explicit basis. local = true uses the per-block
// local variance, otherwise the global first-difference estimate.
inline std::vector<double> block_estimate(const Matrix& basis, std::span<const double> y, double s,
                                          bool local) {
  const std::size_t n = y.size();
  const double nd = static_cast<double>(n);
  const Schedule sch = schedule(n, s);
  const double global = first_difference_variance(y);
  std::vector<double> scaled(y.begin(), y.end());
  for (double& v : scaled) v /= std::sqrt(nd);
  auto c = project(basis, scaled);
  const std::size_t l = sch.block_len;
  std::size_t r = std::size_t{1} << sch.coarse;
  for (int j = sch.coarse; (std::size_t{1} << j) < n; ++j) {
    const std::size_t width = std::size_t{1} << j;
    for (std::size_t first = 0; first < width; first += l) {
      const std::size_t last = std::min(first + l, width);
      double energy = 0.0;
      for (std::size_t k = first; k < last; ++k) energy += c[r + k] * c[r + k];
      energy /= static_cast<double>(l);
      const double var = local ? local_variance(y, j, first, last) : global;
      if (!(energy > var / nd)) {
        for (std::size_t k = first; k < last; ++k) c[r + k] = 0.0;
      }
    }
    r += width;
  }
  auto fit = synthesize(basis, c);
  for (double& v : fit) v *= std::sqrt(nd);
  return fit;
}

}  // namespace nsdwav::oracle
