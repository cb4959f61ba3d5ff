#include "ringbec/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace ringbec::kernels {

namespace {

struct SerialPolicy {
  template <std::size_t K, class F>
  static std::array<double, K> reduce(std::size_t count, F&& f) {
    return f(std::size_t{0}, count);
  }
  template <class F>
  static void for_range(std::size_t count, F&& f) {
    f(std::size_t{0}, count);
  }
};

struct ParallelPolicy {
  template <std::size_t K, class F>
  static std::array<double, K> reduce(std::size_t count, F&& f) {
    const std::size_t nblocks = (count + kBlock - 1) / kBlock;
    std::vector<std::array<double, K>> partial(nblocks);
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      partial[static_cast<std::size_t>(b)] = f(lo, std::min(lo + kBlock, count));
    }
    std::array<double, K> total{};
    for (const auto& p : partial)
      for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
    return total;
  }
  template <class F>
  static void for_range(std::size_t count, F&& f) {
    const std::size_t nblocks = (count + kBlock - 1) / kBlock;
    const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
      f(lo, std::min(lo + kBlock, count));
    }
  }
};

template <class P>
double dot_impl(CSpan a, CSpan b) {
  return P::template reduce<1>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    return std::array<double, 1>{s};
  })[0];
}

template <class P>
cplx cdot_impl(CSpan a, CSpan b) {
  auto r = P::template reduce<2>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
      im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
    }
    return std::array<double, 2>{re, im};
  });
  return {r[0], r[1]};
}

template <class P>
double norm_sq_impl(CSpan a) {
  return P::template reduce<1>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += std::norm(a[k]);
    return std::array<double, 1>{s};
  })[0];
}

template <class P>
double max_abs_impl(CSpan a) {
  // max is order independent, so a plain OpenMP reduction stays deterministic
  double m = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  if constexpr (std::is_same_v<P, ParallelPolicy>) {
#pragma omp parallel for reduction(max : m) schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) m = std::max(m, std::abs(a[static_cast<std::size_t>(k)]));
  } else {
    for (std::ptrdiff_t k = 0; k < n; ++k) m = std::max(m, std::abs(a[static_cast<std::size_t>(k)]));
  }
  return m;
}

template <class P>
double weighted_norm_sq_impl(RSpan w, CSpan a) {
  return P::template reduce<1>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += w[k] * std::norm(a[k]);
    return std::array<double, 1>{s};
  })[0];
}

template <class P>
double interaction_sum_impl(double a1, double a2, double beta, CSpan u1, CSpan u2) {
  return P::template reduce<1>(u1.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double r1 = std::norm(u1[k]);
      const double r2 = std::norm(u2[k]);
      s += 0.5 * a1 * r1 * r1 + 0.5 * a2 * r2 * r2 + beta * r1 * r2;
    }
    return std::array<double, 1>{s};
  })[0];
}

template <class P>
QuarticCoeffs quartic_coeffs_impl(double a1, double a2, double beta, CSpan u1, CSpan p1, CSpan u2, CSpan p2) {
  return P::template reduce<5>(u1.size(), [&](std::size_t lo, std::size_t hi) {
    QuarticCoeffs c{};
    for (std::size_t k = lo; k < hi; ++k) {
      const double A1 = std::norm(u1[k]), D1 = std::norm(p1[k]);
      const double B1 = u1[k].real() * p1[k].real() + u1[k].imag() * p1[k].imag();
      const double A2 = std::norm(u2[k]), D2 = std::norm(p2[k]);
      const double B2 = u2[k].real() * p2[k].real() + u2[k].imag() * p2[k].imag();
      const double h1 = 0.5 * a1, h2 = 0.5 * a2;
      c[0] += h1 * A1 * A1 + h2 * A2 * A2 + beta * A1 * A2;
      c[1] += 4.0 * (h1 * A1 * B1 + h2 * A2 * B2) + 2.0 * beta * (A1 * B2 + B1 * A2);
      c[2] += h1 * (4.0 * B1 * B1 + 2.0 * A1 * D1) + h2 * (4.0 * B2 * B2 + 2.0 * A2 * D2) +
              beta * (A1 * D2 + D1 * A2 + 4.0 * B1 * B2);
      c[3] += 4.0 * (h1 * B1 * D1 + h2 * B2 * D2) + 2.0 * beta * (B1 * D2 + D1 * B2);
      c[4] += h1 * D1 * D1 + h2 * D2 * D2 + beta * D1 * D2;
    }
    return c;
  });
}

template <class P>
void axpy_impl(cplx alpha, CSpan x, MSpan y) {
  P::for_range(x.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) y[k] += alpha * x[k];
  });
}

template <class P>
void lincomb_impl(double a, CSpan x, double b, CSpan y, MSpan out) {
  P::for_range(x.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) out[k] = a * x[k] + b * y[k];
  });
}

template <class P>
void scale_impl(double s, MSpan x) {
  P::for_range(x.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) x[k] *= s;
  });
}

template <class P>
void mul_real_impl(RSpan w, CSpan x, MSpan out) {
  P::for_range(x.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) out[k] = w[k] * x[k];
  });
}

template <class P>
void magnetic_hamiltonian_impl(const GridSpec& grid, double omega, RSpan potential, CSpan u, CSpan lap, CSpan d1,
                               CSpan d2, MSpan out) {
  const std::size_t n = grid.n;
  P::for_range(u.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const double x1 = grid.coord(k / n);
      const double x2 = grid.coord(k % n);
      const cplx rot = -x2 * d1[k] + x1 * d2[k];
      out[k] = -lap[k] + potential[k] * u[k] + cplx(0.0, omega) * rot;
    }
  });
}

template <class P>
void subtract_interaction_impl(double a1, double a2, double beta, CSpan u1, CSpan u2, MSpan g1, MSpan g2) {
  P::for_range(u1.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const double r1 = std::norm(u1[k]);
      const double r2 = std::norm(u2[k]);
      g1[k] -= (a1 * r1 + beta * r2) * u1[k];
      g2[k] -= (a2 * r2 + beta * r1) * u2[k];
    }
  });
}

}  // namespace

#define RINGBEC_KERNEL_DEFS(Policy)                                                                           \
  double dot(CSpan a, CSpan b) { return dot_impl<Policy>(a, b); }                                             \
  cplx cdot(CSpan a, CSpan b) { return cdot_impl<Policy>(a, b); }                                             \
  double norm_sq(CSpan a) { return norm_sq_impl<Policy>(a); }                                                 \
  double max_abs(CSpan a) { return max_abs_impl<Policy>(a); }                                                 \
  double weighted_norm_sq(RSpan w, CSpan a) { return weighted_norm_sq_impl<Policy>(w, a); }                   \
  double interaction_sum(double a1, double a2, double beta, CSpan u1, CSpan u2) {                            \
    return interaction_sum_impl<Policy>(a1, a2, beta, u1, u2);                                                \
  }                                                                                                           \
  QuarticCoeffs quartic_coeffs(double a1, double a2, double beta, CSpan u1, CSpan p1, CSpan u2, CSpan p2) {   \
    return quartic_coeffs_impl<Policy>(a1, a2, beta, u1, p1, u2, p2);                                         \
  }                                                                                                           \
  void axpy(cplx alpha, CSpan x, MSpan y) { axpy_impl<Policy>(alpha, x, y); }                                 \
  void lincomb(double a, CSpan x, double b, CSpan y, MSpan out) { lincomb_impl<Policy>(a, x, b, y, out); }    \
  void scale(double s, MSpan x) { scale_impl<Policy>(s, x); }                                                 \
  void mul_real(RSpan w, CSpan x, MSpan out) { mul_real_impl<Policy>(w, x, out); }                            \
  void magnetic_hamiltonian(const GridSpec& grid, double omega, RSpan potential, CSpan u, CSpan lap, CSpan d1, \
                            CSpan d2, MSpan out) {                                                            \
    magnetic_hamiltonian_impl<Policy>(grid, omega, potential, u, lap, d1, d2, out);                           \
  }                                                                                                           \
  void subtract_interaction(double a1, double a2, double beta, CSpan u1, CSpan u2, MSpan g1, MSpan g2) {      \
    subtract_interaction_impl<Policy>(a1, a2, beta, u1, u2, g1, g2);                                          \
  }

namespace serial {
RINGBEC_KERNEL_DEFS(SerialPolicy)
}
namespace parallel {
RINGBEC_KERNEL_DEFS(ParallelPolicy)
}

#undef RINGBEC_KERNEL_DEFS

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace ringbec::kernels
