#include "ringbec/soliton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "json.hpp"
#include "ringbec/error.hpp"

namespace ringbec {

namespace {

using State = std::array<double, 2>;

void radial_rhs(const State& y, State& dydr, double r) {
  const double u = y[0], du = y[1];
  dydr[0] = du;
  // regular singular point: u'/r -> u''(0), so u''(0) = (u - u^3)/2
  dydr[1] = r == 0.0 ? 0.5 * (u - u * u * u) : -du / r + u - u * u * u;
}

enum class Shot { TooLow, TooHigh, Undecided };

struct ShotResult {
  Shot kind = Shot::Undecided;
  double decided_at = 0.0;
  std::vector<double> u, du;  // node samples up to where the shot stayed valid
};

// Integrates with adaptive Dormand-Prince and samples on the uniform node grid.
ShotResult shoot(double u0, double dr, std::size_t nodes, bool record) {
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_dense_output(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
  State y{u0, 0.0};
  stepper.initialize(y, 0.0, dr);
  ShotResult res;
  if (record) {
    res.u.reserve(nodes);
    res.du.reserve(nodes);
  }
  std::size_t next = 0;
  State s{};
  while (next < nodes) {
    const double target = static_cast<double>(next) * dr;
    if (next == 0) {
      s = y;
    } else {
      while (stepper.current_time() < target) stepper.do_step(radial_rhs);
      stepper.calc_state(target, s);
    }
    if (s[0] < 0.0) {
      res.kind = Shot::TooHigh;
      res.decided_at = target;
      return res;
    }
    if (next > 0 && s[1] > 0.0) {
      res.kind = Shot::TooLow;
      res.decided_at = target;
      return res;
    }
    if (record) {
      res.u.push_back(s[0]);
      res.du.push_back(next == 0 ? 0.0 : s[1]);
    }
    ++next;
  }
  res.decided_at = static_cast<double>(nodes) * dr;
  return res;
}

double tail_form(double c, double r) { return c * std::exp(-r) / std::sqrt(r); }

double simpson(const std::vector<double>& f, double dr) {
  // f sampled on 0, dr, ..., with an even number of intervals
  const std::size_t m = f.size() - 1;
  double s = f.front() + f.back();
  for (std::size_t k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f[k];
  return s * dr / 3.0;
}

}  // namespace

RadialSolitonProfile solve_soliton(double r_max, double tol) {
  SolitonOptions o;
  o.r_max = r_max;
  o.tol = tol;
  return solve_soliton(o);
}

RadialSolitonProfile solve_soliton(const SolitonOptions& opts) {
  if (opts.r_max < 10.0) throw Error(ErrorCode::DomainViolation, "soliton r_max must be >= 10");
  if (opts.tol < 1e-12) throw Error(ErrorCode::DomainViolation, "soliton tol must be >= 1e-12");
  std::size_t intervals = static_cast<std::size_t>(std::ceil(opts.r_max / opts.dr));
  if (intervals % 2) ++intervals;
  const double dr = opts.r_max / static_cast<double>(intervals);
  const std::size_t nodes = intervals + 1;

  double lo = opts.bracket_lo, hi = opts.bracket_hi;
  if (shoot(lo, dr, nodes, false).kind != Shot::TooLow || shoot(hi, dr, nodes, false).kind != Shot::TooHigh)
    throw Error(ErrorCode::BracketNotFound, "shooting bracket does not enclose the ground state");

  // The shot is unstable (errors grow like e^{2r}), so bisect to the last
  // representable midpoint; tol only sets the minimum acceptable accuracy.
  int it = 0;
  for (; it < opts.max_bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Shot k = shoot(mid, dr, nodes, false).kind;
    if (k == Shot::TooLow)
      lo = mid;
    else if (k == Shot::TooHigh)
      hi = mid;
    else {
      lo = hi = mid;
      break;
    }
  }
  if ((hi - lo) > opts.tol * lo)
    throw Error(ErrorCode::NonConvergence, "shooting bisection did not reach the requested tolerance");

  ShotResult a = shoot(lo, dr, nodes, true);
  ShotResult b = shoot(hi, dr, nodes, true);
  ShotResult& best = a.decided_at >= b.decided_at ? a : b;
  const double u0 = best.u.front();

  std::size_t m = 0;
  while (m < best.u.size() && best.u[m] >= 1e-6 * u0) ++m;
  if (m >= best.u.size()) m = best.u.size() - 1;
  // blend over one unit of radius, staying inside the reliable part of the shot
  const std::size_t width = static_cast<std::size_t>(std::lround(1.0 / dr));
  const std::size_t e = std::min(m + width, best.u.size() - 1);
  for (std::size_t k = 1; k <= e; ++k)
    if (!(best.u[k] < best.u[k - 1]) || best.u[k] <= 0.0)
      throw Error(ErrorCode::NonConvergence, "integrated profile lost monotonicity before the matching radius");

  RadialSolitonProfile p;
  p.shoot_height = u0;
  p.matching_radius = static_cast<double>(m) * dr;
  p.blend_end = static_cast<double>(e) * dr;
  p.tail_amplitude = best.u[m] * std::sqrt(p.matching_radius) * std::exp(p.matching_radius);
  p.r_nodes.resize(nodes);
  p.q_values.resize(nodes);
  p.q_derivs.resize(nodes);
  p.q_second.resize(nodes);
  const double span = p.blend_end - p.matching_radius;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double r = static_cast<double>(k) * dr;
    p.r_nodes[k] = r;
    const double t = tail_form(p.tail_amplitude, r);
    const double dt = -t * (1.0 + 0.5 / r);
    const double d2t = t * (1.0 + 1.0 / r + 0.75 / (r * r));
    if (k > e) {
      p.q_values[k] = t;
      p.q_derivs[k] = dt;
      p.q_second[k] = d2t;
      continue;
    }
    const double u = best.u[k], du = best.du[k];
    const double d2u = k == 0 ? 0.5 * (u - u * u * u) : u - u * u * u - du / r;
    if (k <= m || span == 0.0) {
      p.q_values[k] = u;
      p.q_derivs[k] = du;
      p.q_second[k] = d2u;
      continue;
    }
    // quintic smoothstep keeps the profile C2 across the blend
    const double x = (r - p.matching_radius) / span;
    const double sm = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    const double s1 = 30.0 * x * x * (1.0 - x) * (1.0 - x) / span;
    const double s2 = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x) / (span * span);
    p.q_values[k] = (1.0 - sm) * u + sm * t;
    p.q_derivs[k] = (1.0 - sm) * du + sm * dt + s1 * (t - u);
    p.q_second[k] = (1.0 - sm) * d2u + sm * d2t + 2.0 * s1 * (dt - du) + s2 * (t - u);
  }
  return p;
}

RadialSolitonProfile::Jet RadialSolitonProfile::jet(double r) const {
  r = std::abs(r);
  if (r >= blend_end) {
    const double q = tail_form(tail_amplitude, r);
    const double dq = -q * (1.0 + 0.5 / r);
    const double d2q = q * (1.0 + 1.0 / r + 0.75 / (r * r));
    return {q, dq, d2q};
  }
  const double dr = r_nodes[1] - r_nodes[0];
  std::size_t k = std::min(static_cast<std::size_t>(r / dr), r_nodes.size() - 2);
  const double t = (r - r_nodes[k]) / dr;
  const double p0 = q_values[k], p1 = q_values[k + 1];
  const double m0 = q_derivs[k] * dr, m1 = q_derivs[k + 1] * dr;
  const double s0 = q_second[k] * dr * dr, s1 = q_second[k + 1] * dr * dr;
  const double c0 = p0, c1 = m0, c2 = 0.5 * s0;
  const double c3 = 10.0 * (p1 - p0) - 6.0 * m0 - 4.0 * m1 - 0.5 * (3.0 * s0 - s1);
  const double c4 = -15.0 * (p1 - p0) + 8.0 * m0 + 7.0 * m1 + 0.5 * (3.0 * s0 - 2.0 * s1);
  const double c5 = 6.0 * (p1 - p0) - 3.0 * m0 - 3.0 * m1 - 0.5 * (s0 - s1);
  const double q = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
  const double dq = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
  const double d2q = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
  return {q, dq / dr, d2q / (dr * dr)};
}

namespace {

template <class F>
double radial_integral(const RadialSolitonProfile& p, F&& integrand) {
  std::vector<double> f(p.r_nodes.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = integrand(p.r_nodes[k], p.q_values[k], p.q_derivs[k]) * p.r_nodes[k];
  return 2.0 * std::numbers::pi * simpson(f, p.r_nodes[1] - p.r_nodes[0]);
}

}  // namespace

double soliton_mass(const RadialSolitonProfile& p) {
  return radial_integral(p, [](double, double q, double) { return q * q; });
}

double SolitonIdentities::max_relative_gap() const {
  const double vals[3] = {mass, half_quartic, dirichlet};
  double gap = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      gap = std::max(gap, std::abs(vals[a] - vals[b]) / std::max(std::abs(vals[a]), std::abs(vals[b])));
  return gap;
}

SolitonIdentities soliton_identities(const RadialSolitonProfile& p) {
  SolitonIdentities s;
  s.mass = soliton_mass(p);
  s.half_quartic = 0.5 * radial_integral(p, [](double, double q, double) { return q * q * q * q; });
  s.dirichlet = radial_integral(p, [](double, double, double dq) { return dq * dq; });
  return s;
}

double radial_moment(const RadialSolitonProfile& p, MomentWeight w) {
  const double m2 = radial_integral(p, [](double r, double q, double) { return r * r * q * q; });
  const double m4 = radial_integral(p, [](double r, double q, double) { return r * r * r * r * q * q; });
  switch (w) {
    case MomentWeight::R2: return m2;
    case MomentWeight::R4: return m4;
    case MomentWeight::X2Sq: return 0.5 * m2;
    case MomentWeight::X2SqR2: return 0.5 * m4;
    case MomentWeight::X2Pow4: return 0.375 * m4;
  }
  return 0.0;
}

std::vector<ComplexField2D> rasterize(const RadialSolitonProfile& p, const GridSpec& grid, Point2 center,
                                      DerivativeOrder order) {
  validate_grid(grid);
  const double L = grid.extent;
  // distance from the center to the nearest box edge
  const double edge = std::min({L - std::abs(center.x1), L - std::abs(center.x2)});
  if (edge <= 0.0 || p.value(edge) > 1e-8 * p.shoot_height)
    throw Error(ErrorCode::ExtentTooSmall, "grid of half-width " + std::to_string(L) +
                                               " cannot hold the soliton support around the requested center");
  const int ord = static_cast<int>(order);
  const std::size_t count = ord == 0 ? 1 : (ord == 1 ? 2 : 4);
  std::vector<ComplexField2D> out(count, ComplexField2D(grid));
  const std::size_t n = grid.n;
  const double d2q0 = 0.5 * (p.shoot_height - std::pow(p.shoot_height, 3));
  for (std::size_t i = 0; i < n; ++i) {
    const double y1 = grid.coord(i) - center.x1;
    for (std::size_t j = 0; j < n; ++j) {
      const double y2 = grid.coord(j) - center.x2;
      const double r = std::hypot(y1, y2);
      const auto jt = p.jet(r);
      const std::size_t k = i * n + j;
      if (ord == 0) {
        out[0].values[k] = jt.q;
      } else if (ord == 1) {
        const double g = r > 0.0 ? jt.dq / r : 0.0;
        out[0].values[k] = g * y1;
        out[1].values[k] = g * y2;
      } else {
        double h11, h12, h22;
        if (r < 1e-8) {
          h11 = h22 = d2q0;
          h12 = 0.0;
        } else {
          const double n1 = y1 / r, n2 = y2 / r, g = jt.dq / r;
          h11 = jt.d2q * n1 * n1 + g * (1.0 - n1 * n1);
          h22 = jt.d2q * n2 * n2 + g * (1.0 - n2 * n2);
          h12 = (jt.d2q - g) * n1 * n2;
        }
        out[0].values[k] = h11;
        out[1].values[k] = h12;
        out[2].values[k] = h12;
        out[3].values[k] = h22;
      }
    }
  }
  return out;
}

ComplexField2D rasterize_q(const RadialSolitonProfile& p, const GridSpec& grid, Point2 center) {
  return std::move(rasterize(p, grid, center, DerivativeOrder::Value).front());
}

void write_profile_csv(const std::filesystem::path& path, const RadialSolitonProfile& p,
                       const std::string& config_hash) {
  nlohmann::ordered_json h;
  h["shoot_height"] = p.shoot_height;
  h["tail_amplitude"] = p.tail_amplitude;
  h["r_max"] = p.r_max();
  h["a_star"] = soliton_mass(p);
  h["matching_radius"] = p.matching_radius;
  h["blend_end"] = p.blend_end;
  if (!config_hash.empty()) h["config_hash"] = config_hash;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "# " << h.dump() << "\n";
  out << "r,Q,Qprime\n";
  char buf[96];
  for (std::size_t k = 0; k < p.r_nodes.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.r_nodes[k], p.q_values[k], p.q_derivs[k]);
    out << buf;
  }
}

}  // namespace ringbec
