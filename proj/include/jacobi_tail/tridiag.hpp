#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "params.hpp"
#include "sampling.hpp"

namespace jtail {

/// Symmetric tridiagonal matrix. `c` and `s` are the beta variates a Jacobi
/// draw was generated from (empty for matrices built by hand).
struct TridiagonalMatrix {
  std::vector<double> diag;     // a_1..a_n
  std::vector<double> offdiag;  // b_1..b_{n-1}
  std::vector<double> c;        // c_1..c_n
  std::vector<double> s;        // s_1..s_{n-1}

  [[nodiscard]] std::size_t size() const { return diag.size(); }
};

/// Test hooks for the matrix model. Production code leaves these at defaults.
struct JacobiModelHooks {
  double offdiag_scale = 1.0;
};

/// Killip-Nenciu style tridiagonal model whose spectrum is J_n(p1, p2):
///   c_k ~ Beta(beta/2 (p1-k+1), beta/2 (p2-k+1)),   k = 1..n
///   s_k ~ Beta(beta/2 (n-k),    beta/2 (p-n-k+1)),  k = 1..n-1
///   a_k = s_{k-1} (1 - c_{k-1}) + c_k (1 - s_{k-1})
///   b_k = sqrt(c_k (1 - c_k) s_k (1 - s_{k-1}))
/// with c_0 = s_0 = 0 and s_n = 0 (the s_n law would be degenerate).
inline TridiagonalMatrix build_jacobi_tridiagonal(const ModelParams& m, RngStream& rng,
                                                  const JacobiModelHooks& hooks = {}) {
  validate_ensemble(m);
  const int n = m.n;
  const double hb = m.beta / 2;
  const double p = m.p();
  TridiagonalMatrix t;
  t.c.resize(n);
  t.s.resize(n - 1);
  for (int k = 1; k <= n; ++k) {
    t.c[k - 1] = sample_beta(rng, hb * (m.p1 - k + 1), hb * (m.p2 - k + 1));
    if (k < n) t.s[k - 1] = sample_beta(rng, hb * (n - k), hb * (p - n - k + 1));
  }
  t.diag.resize(n);
  t.offdiag.resize(n - 1);
  for (int k = 1; k <= n; ++k) {
    const double c_prev = k > 1 ? t.c[k - 2] : 0.0;
    const double s_prev = k > 1 ? t.s[k - 2] : 0.0;
    const double ck = t.c[k - 1];
    t.diag[k - 1] = s_prev * (1 - c_prev) + ck * (1 - s_prev);
    if (k < n) {
      const double sk = t.s[k - 1];
      t.offdiag[k - 1] = hooks.offdiag_scale * std::sqrt(ck * (1 - ck) * sk * (1 - s_prev));
    }
  }
  return t;
}

/// Sum of the diagonal written through the generating variates.
inline double trace_from_generators(const TridiagonalMatrix& t) {
  double sum = 0.0;
  for (std::size_t k = 0; k < t.c.size(); ++k) {
    const double c_prev = k > 0 ? t.c[k - 1] : 0.0;
    const double s_prev = k > 0 ? t.s[k - 1] : 0.0;
    sum += s_prev * (1 - c_prev) + t.c[k] * (1 - s_prev);
  }
  return sum;
}

/// tr(J^2) written through the generating variates.
inline double trace_sq_from_generators(const TridiagonalMatrix& t) {
  double sum = 0.0;
  for (std::size_t k = 0; k < t.c.size(); ++k) {
    const double c_prev = k > 0 ? t.c[k - 1] : 0.0;
    const double s_prev = k > 0 ? t.s[k - 1] : 0.0;
    const double a = s_prev * (1 - c_prev) + t.c[k] * (1 - s_prev);
    sum += a * a;
    if (k + 1 < t.c.size()) sum += 2 * t.c[k] * (1 - t.c[k]) * t.s[k] * (1 - s_prev);
  }
  return sum;
}

/// All eigenvalues of a symmetric tridiagonal matrix, ascending. Implicit-shift
/// QL with Wilkinson-type shifts; throws after 50 n total iterations.
inline std::vector<double> eig_sym_tridiag(std::span<const double> diag,
                                           std::span<const double> offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) throw UsageError("eig_sym_tridiag: empty matrix");
  if (offdiag.size() + 1 != n) throw UsageError("eig_sym_tridiag: off-diagonal length must be n-1");
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const long iter_cap = 50 * static_cast<long>(n);
  long iters = 0;
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (++iters > iter_cap)
          throw NumericalError("eig_sym_tridiag: no convergence after " +
                               std::to_string(iter_cap) + " QL iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          const double f = s * e[i];
          const double b = c * e[i];
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
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

inline std::vector<double> eig_sym_tridiag(const TridiagonalMatrix& t) {
  return eig_sym_tridiag(t.diag, t.offdiag);
}

inline constexpr double kSpectrumSlack = 1e-9;

/// Clamps eigenvalues within kSpectrumSlack of [0, 1] onto it, counting each
/// clamp; anything farther out is a numerical error.
inline void clamp_to_unit_interval(std::vector<double>& eigs, long* clamp_count = nullptr) {
  for (double& v : eigs) {
    if (v >= 0.0 && v <= 1.0) continue;
    if (v < -kSpectrumSlack || v > 1.0 + kSpectrumSlack || std::isnan(v))
      throw NumericalError("Jacobi eigenvalue outside [0,1]: " + std::to_string(v));
    v = std::clamp(v, 0.0, 1.0);
    if (clamp_count) ++*clamp_count;
  }
}

/// Ordered eigenvalues of one draw of the tridiagonal model.
inline std::vector<double> sample_jacobi_ordered(const ModelParams& m, RngStream& rng,
                                                 long* clamp_count = nullptr,
                                                 const JacobiModelHooks& hooks = {}) {
  auto eigs = eig_sym_tridiag(build_jacobi_tridiagonal(m, rng, hooks));
  clamp_to_unit_interval(eigs, clamp_count);
  return eigs;
}

}  // namespace jtail
