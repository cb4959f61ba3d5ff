#include <array>
#include <cmath>

#include "doctest.h"
#include "ringbec/error.hpp"
#include "ringbec/soliton.hpp"

using namespace ringbec;

namespace {

const RadialSolitonProfile& profile() {
  static const RadialSolitonProfile p = solve_soliton(20.0, 1e-10);
  return p;
}

// Independent oracle: fixed-step classical RK4 at half the node spacing,
// bisected on the shooting height with the same classification rule.
double oracle_shoot_height() {
  const double dr = 1.0 / 800.0;
  auto classify = [&](double u0) {
    std::array<double, 2> y{u0, 0.0};
    auto f = [](double r, const std::array<double, 2>& s) {
      const double u = s[0], du = s[1];
      return std::array<double, 2>{du, r == 0.0 ? 0.5 * (u - u * u * u) : -du / r + u - u * u * u};
    };
    for (double r = 0.0; r < 20.0; r += dr) {
      auto k1 = f(r, y);
      std::array<double, 2> t{y[0] + 0.5 * dr * k1[0], y[1] + 0.5 * dr * k1[1]};
      auto k2 = f(r + 0.5 * dr, t);
      t = {y[0] + 0.5 * dr * k2[0], y[1] + 0.5 * dr * k2[1]};
      auto k3 = f(r + 0.5 * dr, t);
      t = {y[0] + dr * k3[0], y[1] + dr * k3[1]};
      auto k4 = f(r + dr, t);
      for (int c = 0; c < 2; ++c) y[c] += dr / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
      if (y[0] < 0.0) return 1;
      if (y[1] > 0.0) return -1;
    }
    return 0;
  };
  double lo = 2.0, hi = 2.5;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (classify(mid) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("shooting height lies in the expected window and matches an independent shooter") {
  const auto& p = profile();
  CHECK(p.shoot_height > 2.0);
  CHECK(p.shoot_height < 2.5);
  CHECK(p.shoot_height == doctest::Approx(oracle_shoot_height()).epsilon(1e-9));
  CHECK(p.q_derivs.front() == 0.0);
}

TEST_CASE("profile is positive and strictly decreasing") {
  const auto& p = profile();
  for (std::size_t k = 1; k < p.q_values.size(); ++k) {
    REQUIRE(p.q_values[k] > 0.0);
    REQUIRE(p.q_values[k] < p.q_values[k - 1]);
  }
}

TEST_CASE("integral identities hold") {
  const auto id = soliton_identities(profile());
  CHECK(id.max_relative_gap() < 1e-6);
}

TEST_CASE("tail follows the asymptotic form") {
  const auto& p = profile();
  const double ratio = p.value(15.0) / p.value(10.0);
  const double form = std::sqrt(10.0 / 15.0) * std::exp(-5.0);
  CHECK(ratio / form < 1.1);
  CHECK(form / ratio < 1.1);
  for (std::size_t k = 0; k < p.r_nodes.size(); ++k) {
    const double r = p.r_nodes[k];
    if (r < 0.8 * p.r_max()) continue;
    const double tail = p.tail_amplitude * std::exp(-r) / std::sqrt(r);
    REQUIRE(std::abs(p.q_values[k] - tail) <= 1e-3 * p.q_values[k]);
  }
}

TEST_CASE("mass is stable under node doubling and radius halving") {
  const double a = soliton_mass(profile());
  SolitonOptions fine;
  fine.dr = 1.0 / 800.0;
  const double a_fine = soliton_mass(solve_soliton(fine));
  CHECK(std::abs(a - a_fine) / a < 1e-6);
  const double a10 = soliton_mass(solve_soliton(10.0, 1e-10));
  CHECK(std::abs(a - a10) / a < 1e-4);
  CHECK(a == doctest::Approx(11.70).epsilon(1e-3));
}

TEST_CASE("interpolated jet is consistent with the radial equation") {
  const auto& p = profile();
  for (double r : {0.0, 0.013, 0.5, 1.7, 4.123, 9.99}) {
    const auto j = p.jet(r);
    const double lhs = r == 0.0 ? 2.0 * j.d2q : j.d2q + j.dq / r;
    CHECK(std::abs(lhs - j.q + j.q * j.q * j.q) < 1e-8);
  }
}

TEST_CASE("rasterization matches the radial profile and its symmetries") {
  const auto& p = profile();
  GridSpec g{256, 20.0};
  auto q = rasterize_q(p, g);
  CHECK(std::abs(q.at(128, 128).real() - p.shoot_height) < 1e-8);
  const double a_grid = integrate_abs2(q);
  CHECK(std::abs(a_grid - soliton_mass(p)) / soliton_mass(p) < 1e-4);
  double r4 = 0.0;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      const double x1 = g.coord(i), x2 = g.coord(j), rr = x1 * x1 + x2 * x2;
      r4 += rr * rr * std::norm(q.at(i, j));
    }
  r4 *= g.cell_area();
  const double r4_radial = radial_moment(p, MomentWeight::R4);
  CHECK(std::abs(r4 - r4_radial) / r4_radial < 1e-4);
  CHECK(radial_moment(p, MomentWeight::X2Sq) == 0.5 * radial_moment(p, MomentWeight::R2));

  auto grad = rasterize(p, g, {}, DerivativeOrder::Gradient);
  double odd = 0.0, sym = 0.0, imag = 0.0;
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      // row 0 (x1 = -L) is its own periodic image
      if (i > 0) odd = std::max(odd, std::abs(grad[0].at(i, j) + grad[0].at(g.mirror(i), j)));
      sym = std::max({sym, std::abs(q.at(i, j) - q.at(j, i)), std::abs(q.at(i, j) - q.at(g.mirror(i), j)),
                      std::abs(q.at(i, j) - q.at(i, g.mirror(j)))});
      imag = std::max(imag, std::abs(grad[1].at(i, j).imag()));
    }
  CHECK(odd == 0.0);
  CHECK(sym < 1e-10);
  CHECK(imag == 0.0);
}

TEST_CASE("rasterization refuses boxes that clip the support") {
  CHECK_THROWS_AS(rasterize_q(profile(), GridSpec{64, 4.0}), Error);
}
