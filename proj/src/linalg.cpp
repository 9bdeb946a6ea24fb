#include "wire/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wire {

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form; the
// accumulated transform is left in `a` for eigenvector recovery.
void tridiagonalize(std::vector<double>& a, std::vector<double>& d,
                    std::vector<double>& e, int n) {
  for (int i = n - 1; i >= 1; --i) {
    int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(a[(std::size_t)i * n + k]);
      if (scale == 0.0) {
        e[i] = a[(std::size_t)i * n + l];
      } else {
        for (int k = 0; k <= l; ++k) {
          a[(std::size_t)i * n + k] /= scale;
          h += a[(std::size_t)i * n + k] * a[(std::size_t)i * n + k];
        }
        double f = a[(std::size_t)i * n + l];
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a[(std::size_t)i * n + l] = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          a[(std::size_t)j * n + i] = a[(std::size_t)i * n + j] / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k)
            g += a[(std::size_t)j * n + k] * a[(std::size_t)i * n + k];
          for (int k = j + 1; k <= l; ++k)
            g += a[(std::size_t)k * n + j] * a[(std::size_t)i * n + k];
          e[j] = g / h;
          f += e[j] * a[(std::size_t)i * n + j];
        }
        double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = a[(std::size_t)i * n + j];
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k)
            a[(std::size_t)j * n + k] -= f * e[k] + g * a[(std::size_t)i * n + k];
        }
      }
    } else {
      e[i] = a[(std::size_t)i * n + l];
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k)
          g += a[(std::size_t)i * n + k] * a[(std::size_t)k * n + j];
        for (int k = 0; k <= l; ++k)
          a[(std::size_t)k * n + j] -= g * a[(std::size_t)k * n + i];
      }
    }
    d[i] = a[(std::size_t)i * n + i];
    a[(std::size_t)i * n + i] = 1.0;
    for (int j = 0; j <= l; ++j)
      a[(std::size_t)j * n + i] = a[(std::size_t)i * n + j] = 0.0;
  }
}

// Implicit-shift QL on the tridiagonal (d, e); z accumulates eigenvectors.
void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                 std::vector<double>& z, int n) {
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("eigen_symmetric: QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        bool underflow = false;
        for (; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = z[(std::size_t)k * n + i + 1];
            z[(std::size_t)k * n + i + 1] = s * z[(std::size_t)k * n + i] + c * f;
            z[(std::size_t)k * n + i] = c * z[(std::size_t)k * n + i] - s * f;
          }
        }
        if (underflow && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

void eigen_symmetric(std::vector<double>& a, std::vector<double>& w, int n) {
  if (n < 1) throw std::invalid_argument("eigen_symmetric: empty matrix");
  if (a.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("eigen_symmetric: matrix size mismatch");
  std::vector<double> d(n), e(n);
  tridiagonalize(a, d, e, n);
  ql_implicit(d, e, a, n);

  // ascending order, permuting the eigenvector columns to match
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });
  std::vector<double> sorted_a(a.size());
  w.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    w[j] = d[order[j]];
    for (int i = 0; i < n; ++i)
      sorted_a[(std::size_t)i * n + j] = a[(std::size_t)i * n + order[j]];
  }
  a = std::move(sorted_a);
}

}  // namespace wire
