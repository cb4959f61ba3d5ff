#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ringbec/kernels.hpp"

using namespace ringbec;

namespace {

std::vector<cplx> random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("parallel reductions agree with the serial reference") {
  const std::size_t n = 128 * 128 + 17;
  auto a = random_field(n, 1), b = random_field(n, 2), c = random_field(n, 3), d = random_field(n, 4);
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = std::cos(0.001 * static_cast<double>(k));

  CHECK(kernels::parallel::dot(a, b) == doctest::Approx(kernels::serial::dot(a, b)).epsilon(1e-12));
  CHECK(kernels::parallel::norm_sq(a) == doctest::Approx(kernels::serial::norm_sq(a)).epsilon(1e-12));
  CHECK(kernels::parallel::max_abs(a) == kernels::serial::max_abs(a));
  CHECK(kernels::parallel::weighted_norm_sq(w, a) ==
        doctest::Approx(kernels::serial::weighted_norm_sq(w, a)).epsilon(1e-12));
  const cplx cp = kernels::parallel::cdot(a, b), cs = kernels::serial::cdot(a, b);
  CHECK(std::abs(cp - cs) < 1e-10 * std::abs(cs));
  CHECK(kernels::parallel::interaction_sum(1.0, 2.0, 3.0, a, b) ==
        doctest::Approx(kernels::serial::interaction_sum(1.0, 2.0, 3.0, a, b)).epsilon(1e-12));
  auto qp = kernels::parallel::quartic_coeffs(1.0, 2.0, 3.0, a, b, c, d);
  auto qs = kernels::serial::quartic_coeffs(1.0, 2.0, 3.0, a, b, c, d);
  for (int k = 0; k < 5; ++k) CHECK(qp[k] == doctest::Approx(qs[k]).epsilon(1e-12));
}

TEST_CASE("parallel reductions are bit-identical across thread counts") {
  auto a = random_field(200000, 5), b = random_field(200000, 6);
  kernels::set_threads(1);
  const double d1 = kernels::dot(a, b);
  kernels::set_threads(4);
  const double d4 = kernels::dot(a, b);
  kernels::set_threads(1);
  CHECK(d1 == d4);
}

TEST_CASE("quartic coefficients reproduce the interaction energy along a great circle") {
  const std::size_t n = 999;
  auto u1 = random_field(n, 7), p1 = random_field(n, 8), u2 = random_field(n, 9), p2 = random_field(n, 10);
  const double a1 = 0.7, a2 = 1.3, beta = 2.1;
  auto q = kernels::quartic_coeffs(a1, a2, beta, u1, p1, u2, p2);
  for (double th : {0.0, 0.3, 1.1, -0.7}) {
    const double c = std::cos(th), s = std::sin(th);
    std::vector<cplx> v1(n), v2(n);
    for (std::size_t k = 0; k < n; ++k) {
      v1[k] = c * u1[k] + s * p1[k];
      v2[k] = c * u2[k] + s * p2[k];
    }
    const double direct = kernels::interaction_sum(a1, a2, beta, v1, v2);
    const double poly = q[0] * c * c * c * c + q[1] * c * c * c * s + q[2] * c * c * s * s + q[3] * c * s * s * s +
                        q[4] * s * s * s * s;
    CHECK(poly == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("magnetic hamiltonian kernel matches its definition") {
  GridSpec g{8, 2.0};
  auto u = random_field(g.size(), 11), lap = random_field(g.size(), 12), d1 = random_field(g.size(), 13),
       d2 = random_field(g.size(), 14);
  std::vector<double> v(g.size(), 0.5);
  std::vector<cplx> out(g.size()), ref(g.size());
  kernels::magnetic_hamiltonian(g, 0.8, v, u, lap, d1, d2, out);
  kernels::serial::magnetic_hamiltonian(g, 0.8, v, u, lap, d1, d2, ref);
  const std::size_t k = 3 * 8 + 6;
  const double x1 = g.coord(3), x2 = g.coord(6);
  const cplx expect = -lap[k] + 0.5 * u[k] + cplx(0.0, 0.8) * (-x2 * d1[k] + x1 * d2[k]);
  CHECK(std::abs(out[k] - expect) < 1e-14);
  CHECK(out == ref);
}
