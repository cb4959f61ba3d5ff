#include "ringbec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "ringbec/error.hpp"
#include "ringbec/kernels.hpp"
#include "ringbec/spectral.hpp"

namespace ringbec {

namespace {

constexpr double kPi = std::numbers::pi;

ComplexField2D total_density(const TwoComponentState& s) {
  require_same_grid(s.u1.grid, s.u2.grid);
  ComplexField2D d(s.grid());
  for (std::size_t k = 0; k < d.size(); ++k) d.values[k] = std::norm(s.u1.values[k]) + std::norm(s.u2.values[k]);
  return d;
}

// Value, gradient and Hessian of the trigonometric interpolant of a real field.
struct TrigInterpolant {
  GridSpec grid;
  std::vector<cplx> coeff;
  std::vector<double> k;

  explicit TrigInterpolant(const ComplexField2D& f) : grid(f.grid), coeff(f.size()) {
    Spectral sp(grid);
    sp.forward(f.values, coeff);
    const double inv = 1.0 / static_cast<double>(f.size());
    for (auto& c : coeff) c *= inv;
    k = sp.wavenumbers();
  }

  // {f, f1, f2, f11, f12, f22}
  std::array<double, 6> eval(Point2 y) const {
    const std::size_t n = grid.n;
    const double t1 = y.x1 + grid.extent, t2 = y.x2 + grid.extent;
    std::vector<cplx> e2(n);
    for (std::size_t b = 0; b < n; ++b) e2[b] = std::polar(1.0, k[b] * t2);
    std::array<cplx, 6> acc{};
    for (std::size_t a = 0; a < n; ++a) {
      cplx s0 = 0.0, s1 = 0.0, s2 = 0.0;
      const cplx* row = &coeff[a * n];
      for (std::size_t b = 0; b < n; ++b) {
        const cplx v = row[b] * e2[b];
        s0 += v;
        s1 += v * k[b];
        s2 += v * (k[b] * k[b]);
      }
      const cplx e1 = std::polar(1.0, k[a] * t1);
      const double ka = k[a];
      const cplx I(0.0, 1.0);
      acc[0] += e1 * s0;
      acc[1] += e1 * I * ka * s0;
      acc[2] += e1 * I * s1;
      acc[3] += -e1 * ka * ka * s0;
      acc[4] += -e1 * ka * s1;
      acc[5] += -e1 * s2;
    }
    return {acc[0].real(), acc[1].real(), acc[2].real(), acc[3].real(), acc[4].real(), acc[5].real()};
  }
};

// The sampling error of the spline tracks the lab spacing, so refining the lab
// grid refines the blow-up samples too.
std::size_t upsample_size(std::size_t n) { return 4 * n; }

}  // namespace

Point2 locate_peak(const ComplexField2D& density, bool polish) {
  const GridSpec& g = density.grid;
  const std::size_t n = g.n;
  std::size_t bi = 0, bj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = density.at(i, j).real();
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  if (bi == 0 || bj == 0 || bi == n - 1 || bj == n - 1)
    throw Error(ErrorCode::PeakOnBoundary, "density maximum lies on the grid boundary");

  // Paraboloid c0 + c1 s + c2 t + c3 s^2 + c4 s t + c5 t^2 on the 3x3 stencil (index units).
  Eigen::Matrix<double, 9, 6> M;
  Eigen::Matrix<double, 9, 1> f;
  int row = 0;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj, ++row) {
      M.row(row) << 1.0, di, dj, di * di, di * dj, dj * dj;
      f(row) = density.at(bi + di, bj + dj).real();
    }
  const Eigen::Matrix<double, 6, 1> c = M.colPivHouseholderQr().solve(f);
  Eigen::Matrix2d H;
  H << 2.0 * c(3), c(4), c(4), 2.0 * c(5);
  Point2 p{g.coord(bi), g.coord(bj)};
  if (H.determinant() > 0.0 && H(0, 0) < 0.0) {
    Eigen::Vector2d d = H.lu().solve(Eigen::Vector2d(-c(1), -c(2)));
    d(0) = std::clamp(d(0), -1.0, 1.0);
    d(1) = std::clamp(d(1), -1.0, 1.0);
    p.x1 += d(0) * g.h();
    p.x2 += d(1) * g.h();
  }
  if (!polish) return p;

  const TrigInterpolant trig(density);
  const Point2 start = p;
  for (int it = 0; it < 30; ++it) {
    const auto v = trig.eval(p);
    Eigen::Matrix2d Hs;
    Hs << v[3], v[4], v[4], v[5];
    if (!(Hs.determinant() > 0.0 && Hs(0, 0) < 0.0)) return start;
    const Eigen::Vector2d step = Hs.lu().solve(Eigen::Vector2d(-v[1], -v[2]));
    p.x1 += step(0);
    p.x2 += step(1);
    if (std::hypot(p.x1 - start.x1, p.x2 - start.x2) > g.h()) return start;
    if (step.norm() < 1e-14) break;
  }
  return p;
}

Point2 locate_peak(const TwoComponentState& s, bool polish) { return locate_peak(total_density(s), polish); }

double alignment_phase(const ComplexField2D& w, const ComplexField2D& q) {
  require_same_grid(w.grid, q.grid);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w.values[k] * q.values[k].real();
  double th = -std::arg(acc);
  if (th < 0.0) th += 2.0 * kPi;
  if (th >= 2.0 * kPi) th -= 2.0 * kPi;
  return th;
}

BlowupFrame to_blowup_frame(const TwoComponentState& s, double mu, const CouplingParams& params,
                            const RadialSolitonProfile& profile, const GridSpec& blowup_grid,
                            std::optional<double> scale, std::optional<Point2> peak) {
  validate_grid(blowup_grid);
  if (!scale && !(mu < 0.0))
    throw Error(ErrorCode::DomainViolation, "blow-up frame needs a negative chemical potential");
  const double eps = scale ? *scale : 1.0 / std::sqrt(-mu);
  const Point2 xb = peak ? *peak : locate_peak(s, true);
  const GridSpec& lab = s.grid();
  // the spike core must sit inside the lab box
  const double core = 4.0 * eps;
  if (std::abs(xb.x1) + core > lab.extent || std::abs(xb.x2) + core > lab.extent)
    throw Error(ErrorCode::InterpolationOutOfDomain,
                "blow-up window around the peak leaves the lab box (scale " + std::to_string(eps) + ")");
  const double a_star = soliton_mass(profile);
  const std::size_t m = upsample_size(lab.n);
  const SplineSampler s1(m == lab.n ? s.u1 : resample(s.u1, m));
  const SplineSampler s2(m == lab.n ? s.u2 : resample(s.u2, m));

  BlowupFrame fr{ComplexField2D(blowup_grid), ComplexField2D(blowup_grid), xb, std::hypot(xb.x1, xb.x2), eps};
  const double amp = std::sqrt(a_star) * eps;
  const double w = 0.5 * eps * params.omega;
  for (std::size_t i = 0; i < blowup_grid.n; ++i) {
    const double x1 = blowup_grid.coord(i);
    for (std::size_t j = 0; j < blowup_grid.n; ++j) {
      const double x2 = blowup_grid.coord(j);
      const double y1 = eps * x1 + xb.x1, y2 = eps * x2 + xb.x2;
      // x·x_β⊥ with x_β⊥ = (-x_β2, x_β1)
      const cplx ph = std::polar(amp, -w * (-x1 * xb.x2 + x2 * xb.x1));
      fr.v1.at(i, j) = s1(y1, y2) * ph;
      fr.v2.at(i, j) = s2(y1, y2) * ph;
    }
  }
  const ComplexField2D q = rasterize_q(profile, blowup_grid);
  fr.theta1 = alignment_phase(fr.v1, q);
  fr.theta2 = alignment_phase(fr.v2, q);
  const cplx r1 = std::polar(1.0, fr.theta1), r2 = std::polar(1.0, fr.theta2);
  for (auto& v : fr.v1.values) v *= r1;
  for (auto& v : fr.v2.values) v *= r2;
  return fr;
}

ExpansionErrors expansion_errors(const BlowupFrame& frame, const std::array<ComplexField2D, 2>& order0,
                                 const std::array<ComplexField2D, 2>& order2,
                                 const std::array<ComplexField2D, 2>& order4) {
  auto sup_diff = [&](const std::array<ComplexField2D, 2>& pred) {
    double m = 0.0;
    for (int j = 0; j < 2; ++j) {
      const ComplexField2D& v = j == 0 ? frame.v1 : frame.v2;
      require_same_grid(v.grid, pred[j].grid);
      for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v.values[k] - pred[j].values[k]));
    }
    return m;
  };
  return {sup_diff(order0), sup_diff(order2), sup_diff(order4), 0.0};
}

double lemma_error(const BlowupFrame& eps_frame, const std::array<double, 2>& rho, const ComplexField2D& q,
                   const ComplexField2D& psi1) {
  const double e4 = std::pow(eps_frame.epsilon, 4);
  double m = 0.0;
  for (int j = 0; j < 2; ++j) {
    const ComplexField2D& v = j == 0 ? eps_frame.v1 : eps_frame.v2;
    require_same_grid(v.grid, q.grid);
    require_same_grid(v.grid, psi1.grid);
    for (std::size_t k = 0; k < v.size(); ++k)
      m = std::max(m, std::abs(v.values[k] - rho[j] * (q.values[k] + e4 * psi1.values[k])));
  }
  return m / e4;
}

RateFit rate_checks(const std::vector<RatePoint>& points, double alpha_max, int max_degree) {
  std::vector<double> a2, ratio, e2, shift;
  RateFit out;
  for (const auto& p : points) {
    if (!p.resolved || p.alpha > alpha_max || !(p.epsilon > 0.0)) {
      ++out.excluded;
      continue;
    }
    a2.push_back(p.alpha * p.alpha);
    ratio.push_back(p.epsilon / p.alpha);
    e2.push_back(p.epsilon * p.epsilon);
    shift.push_back((p.p_beta - 1.0) / (p.epsilon * p.epsilon));
  }
  out.used = static_cast<int>(a2.size());
  if (out.used < 4)
    throw Error(ErrorCode::InsufficientPoints,
                "rate fits need at least 4 resolved points, got " + std::to_string(out.used));
  const int degree = std::min(max_degree, out.used - 2);
  out.eps_ratio = polyfit(a2, ratio, degree);
  out.peak_shift = polyfit(e2, shift, degree);
  return out;
}

PohozaevSides pohozaev_sides(const BlowupFrame& frame, const CouplingParams& params, double a_star) {
  const GridSpec& g = frame.v1.grid;
  require_same_grid(g, frame.v2.grid);
  const double eps = frame.epsilon, e2 = eps * eps, e3 = e2 * eps, e4 = e2 * e2;
  const Point2 xb = frame.x_beta;
  Spectral sp(g);
  double lhs = 0.0, rhs = 0.0;
  std::vector<cplx> d1(g.size()), d2(g.size());
  for (int j = 0; j < 2; ++j) {
    const ComplexField2D& v = j == 0 ? frame.v1 : frame.v2;
    const double aj = j == 0 ? params.a1 : params.a2;
    sp.gradient(v.values, d1, d2);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double x1 = g.coord(i);
      for (std::size_t k = 0; k < g.n; ++k) {
        const double x2 = g.coord(k);
        const std::size_t idx = i * g.n + k;
        const double r2 = x1 * x1 + x2 * x2;
        const double y1 = eps * x1 + xb.x1, y2 = eps * x2 + xb.x2;
        const double t = y1 * y1 + y2 * y2 - 1.0;
        const double rho = std::norm(v.values[idx]);
        lhs += aj / (2.0 * a_star) * rho * rho - rho;
        rhs += (0.5 * e4 * params.omega * params.omega * r2 + e2 * t * t +
                2.0 * e3 * t * (eps * r2 + x1 * xb.x1 + x2 * xb.x2)) *
               rho;
        // Re[i ε²Ω (x⊥·∇v)(x·∇conj v)], x⊥ = (-x2, x1)
        const cplx rot = -x2 * d1[idx] + x1 * d2[idx];
        const cplx dil = x1 * d1[idx] + x2 * d2[idx];
        rhs -= (cplx(0.0, e2 * params.omega) * rot * std::conj(dil)).real();
      }
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    lhs += params.beta / a_star * std::norm(frame.v1.values[k]) * std::norm(frame.v2.values[k]);
  lhs *= g.cell_area();
  rhs *= g.cell_area();
  return {lhs, rhs};
}

double pohozaev_residual(const BlowupFrame& frame, const CouplingParams& params, double a_star) {
  const PohozaevSides s = pohozaev_sides(frame, params, a_star);
  return std::abs(s.lhs - s.rhs) / (std::abs(s.lhs) + std::abs(s.rhs));
}

ForceBalance force_balance_residual(const TwoComponentState& s) {
  const GridSpec& g = s.grid();
  double f1 = 0.0, f2 = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x1 = g.coord(i);
    for (std::size_t j = 0; j < g.n; ++j) {
      const double x2 = g.coord(j);
      const double rho = std::norm(s.u1.at(i, j)) + std::norm(s.u2.at(i, j));
      const double t = 4.0 * (x1 * x1 + x2 * x2 - 1.0);
      f1 += t * x1 * rho;
      f2 += t * x2 * rho;
      norm += std::abs(t) * std::hypot(x1, x2) * rho;
    }
  }
  return {std::abs(f2) / norm, std::abs(f1) / norm};
}

SymmetryDefect symmetry_defect(const TwoComponentState& s, double axis_tol) {
  const Point2 p = locate_peak(s, true);
  if (std::abs(p.x1) > axis_tol || !(p.x2 > 0.0))
    throw Error(ErrorCode::PeakNotGaugeFixed, "peak at (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                                                  ") is not on the positive x2-axis");
  SymmetryDefect out;
  for (int j = 0; j < 2; ++j) {
    const ComplexField2D& u = j == 0 ? s.u1 : s.u2;
    const ComplexField2D r = reflect_x1(u);
    const ComplexField2D rc = conjugate(r);
    const double nu = l2_norm(u);
    auto defect = [&](const ComplexField2D& t, double* phase) {
      const double phi = std::arg(complex_inner(u, t));
      if (phase) *phase = phi;
      const cplx rot = std::polar(1.0, phi);
      double acc = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) acc += std::norm(t.values[k] - rot * u.values[k]);
      return std::sqrt(acc * u.grid.cell_area()) / nu;
    };
    out.plain_reflection = std::max(out.plain_reflection, defect(r, &out.phases[j]));
    out.conjugate_reflection = std::max(out.conjugate_reflection, defect(rc, nullptr));
  }
  return out;
}

int winding_diagnostic(const TwoComponentState& s, double radius, std::optional<Point2> center) {
  const Point2 c = center ? *center : locate_peak(s, true);
  const GridSpec& g = s.grid();
  const double lim = g.extent - 2.0 * g.h();
  if (!(radius > 0.0) || std::abs(c.x1) + radius > lim || std::abs(c.x2) + radius > lim)
    throw Error(ErrorCode::CircleExitsGrid, "winding circle of radius " + std::to_string(radius) + " leaves the grid");
  const SplineSampler sampler(s.u1);
  const int m = 720;
  double total = 0.0;
  cplx prev = sampler(c.x1 + radius, c.x2);
  for (int k = 1; k <= m; ++k) {
    const double t = 2.0 * kPi * k / m;
    const cplx cur = sampler(c.x1 + radius * std::cos(t), c.x2 + radius * std::sin(t));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

}  // namespace ringbec
