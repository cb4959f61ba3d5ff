#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

#include "ringbec/field.hpp"

// Pointwise and reduction kernels on flat field storage.
//
// parallel:: splits work into fixed blocks of kBlock nodes and combines block
// partial sums serially in block order, so results do not depend on the
// thread count. serial:: is the plain single-loop reference used by tests and
// the benchmark. The unqualified names forward to parallel::.
namespace ringbec::kernels {

inline constexpr std::size_t kBlock = 4096;

using CSpan = std::span<const cplx>;
using MSpan = std::span<cplx>;
using RSpan = std::span<const double>;

// Coefficients of c^4, c^3 s, c^2 s^2, c s^3, s^4 in
// sum a1/2 rho1^2 + a2/2 rho2^2 + beta rho1 rho2 with rho_j = |c U_j + s P_j|^2.
using QuarticCoeffs = std::array<double, 5>;

#define RINGBEC_KERNEL_DECLS                                                                                  \
  double dot(CSpan a, CSpan b);                                                                               \
  cplx cdot(CSpan a, CSpan b);                                                                                \
  double norm_sq(CSpan a);                                                                                    \
  double max_abs(CSpan a);                                                                                    \
  double weighted_norm_sq(RSpan w, CSpan a);                                                                  \
  double interaction_sum(double a1, double a2, double beta, CSpan u1, CSpan u2);                             \
  QuarticCoeffs quartic_coeffs(double a1, double a2, double beta, CSpan u1, CSpan p1, CSpan u2, CSpan p2);    \
  void axpy(cplx alpha, CSpan x, MSpan y);                                                                    \
  void lincomb(double a, CSpan x, double b, CSpan y, MSpan out);                                              \
  void scale(double s, MSpan x);                                                                              \
  void mul_real(RSpan w, CSpan x, MSpan out);                                                                 \
  void magnetic_hamiltonian(const GridSpec& grid, double omega, RSpan potential, CSpan u, CSpan lap, CSpan d1, \
                            CSpan d2, MSpan out);                                                             \
  void subtract_interaction(double a1, double a2, double beta, CSpan u1, CSpan u2, MSpan g1, MSpan g2);

namespace serial {
RINGBEC_KERNEL_DECLS
}
namespace parallel {
RINGBEC_KERNEL_DECLS
}

#undef RINGBEC_KERNEL_DECLS

using parallel::axpy;
using parallel::cdot;
using parallel::dot;
using parallel::interaction_sum;
using parallel::lincomb;
using parallel::magnetic_hamiltonian;
using parallel::max_abs;
using parallel::mul_real;
using parallel::norm_sq;
using parallel::quartic_coeffs;
using parallel::scale;
using parallel::subtract_interaction;
using parallel::weighted_norm_sq;

void set_threads(int n);

}  // namespace ringbec::kernels
