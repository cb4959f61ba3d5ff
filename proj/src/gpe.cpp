#include "ringbec/gpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "ringbec/diagnostics.hpp"
#include "ringbec/error.hpp"
#include "ringbec/kernels.hpp"

namespace ringbec {

namespace {

constexpr double kPi = std::numbers::pi;

double ipow(double x, int e) {
  if (e < 0) return 0.0;
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= x;
  return r;
}

// E(θ) for U cosθ + P sinθ: quadratic form minus the quartic interaction.
struct LineModel {
  double a = 0.0, b = 0.0, d = 0.0;
  kernels::QuarticCoeffs n{};

  std::array<double, 3> eval(double th) const {
    const double c = std::cos(th), s = std::sin(th);
    const double c2 = std::cos(2.0 * th), s2 = std::sin(2.0 * th);
    double e = a * c * c + 2.0 * b * c * s + d * s * s;
    double de = -(a - d) * s2 + 2.0 * b * c2;
    double d2e = -2.0 * (a - d) * c2 - 4.0 * b * s2;
    for (int k = 0; k <= 4; ++k) {
      const int m = 4 - k;
      e -= n[k] * ipow(c, m) * ipow(s, k);
      de -= n[k] * (-m * ipow(c, m - 1) * ipow(s, k + 1) + k * ipow(c, m + 1) * ipow(s, k - 1));
      d2e -= n[k] * (-m * (-(m - 1) * ipow(c, m - 2) * ipow(s, k + 2) + (k + 1) * ipow(c, m) * ipow(s, k)) +
                     k * (-(m + 1) * ipow(c, m) * ipow(s, k) + (k - 1) * ipow(c, m + 2) * ipow(s, k - 2)));
    }
    return {e, de, d2e};
  }

  // First stationary point beyond 0 along a descent direction.
  double first_minimum() const {
    auto f = [&](double th) { return eval(th)[1]; };
    const auto e0 = eval(0.0);
    double guess = e0[2] > 0.0 ? -e0[1] / e0[2] : 0.1;
    guess = std::clamp(guess, 1e-14, 0.5);
    double lo = 0.0, hi = guess, flo = e0[1], fhi = f(hi);
    while (fhi < 0.0 && hi < 0.5 * kPi) {
      lo = hi;
      flo = fhi;
      hi = std::min(2.0 * hi, 0.5 * kPi);
      fhi = f(hi);
    }
    if (fhi < 0.0) return hi;
    if (fhi == 0.0) return hi;
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(50), it);
    return 0.5 * (r.first + r.second);
  }
};

}  // namespace

void normalize(TwoComponentState& s) {
  const double m = s.total_mass();
  if (!(m > 0.0)) throw Error(ErrorCode::DomainViolation, "cannot normalize a state of zero mass");
  const double f = 1.0 / std::sqrt(m);
  kernels::scale(f, s.u1.values);
  kernels::scale(f, s.u2.values);
}

std::vector<double> effective_potential(const GridSpec& grid, double omega) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x1 = grid.coord(i);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double x2 = grid.coord(j), r2 = x1 * x1 + x2 * x2;
      v[i * grid.n + j] = (r2 - 1.0) * (r2 - 1.0) + 0.25 * omega * omega * r2;
    }
  }
  return v;
}

GpeProblem::GpeProblem(const CouplingParams& params, const GridSpec& grid)
    : params_(params),
      grid_(grid),
      spectral_(grid),
      potential_(effective_potential(grid, params.omega)),
      lap_(grid.size()),
      d1_(grid.size()),
      d2_(grid.size()),
      k2_(spectral_.k2_symbol()),
      symbol_(grid.size()) {}

void GpeProblem::hamiltonian(std::span<const cplx> u, std::span<cplx> out) {
  spectral_.derivatives(u, lap_, d1_, d2_);
  kernels::magnetic_hamiltonian(grid_, params_.omega, potential_, u, lap_, d1_, d2_, out);
}

double GpeProblem::interaction(const TwoComponentState& s) const {
  return kernels::interaction_sum(params_.a1, params_.a2, params_.beta, s.u1.values, s.u2.values) *
         grid_.cell_area();
}

double GpeProblem::energy(const TwoComponentState& s) {
  require_same_grid(s.u1.grid, grid_);
  require_same_grid(s.u2.grid, grid_);
  std::vector<cplx> hu(grid_.size());
  double e = 0.0;
  for (const auto* u : {&s.u1, &s.u2}) {
    hamiltonian(u->values, hu);
    e += kernels::dot(u->values, hu);
  }
  return e * grid_.cell_area() - interaction(s);
}

double GpeProblem::energy_covariant(const TwoComponentState& s) {
  require_same_grid(s.u1.grid, grid_);
  require_same_grid(s.u2.grid, grid_);
  const std::size_t n = grid_.n;
  const double w = 0.5 * params_.omega;
  double e = 0.0;
  for (const auto* u : {&s.u1, &s.u2}) {
    spectral_.gradient(u->values, d1_, d2_);
    for (std::size_t i = 0; i < n; ++i) {
      const double x1 = grid_.coord(i);
      for (std::size_t j = 0; j < n; ++j) {
        const double x2 = grid_.coord(j), r2 = x1 * x1 + x2 * x2;
        const std::size_t k = i * n + j;
        const cplx v = u->values[k];
        // (∇ - iΩ/2 x⊥) with x⊥ = (-x2, x1)
        const cplx c1 = d1_[k] + cplx(0.0, w * x2) * v;
        const cplx c2 = d2_[k] - cplx(0.0, w * x1) * v;
        e += std::norm(c1) + std::norm(c2) + (r2 - 1.0) * (r2 - 1.0) * std::norm(v);
      }
    }
  }
  return e * grid_.cell_area() - interaction(s);
}

std::pair<ComplexField2D, ComplexField2D> GpeProblem::el_gradient(const TwoComponentState& s) {
  require_same_grid(s.u1.grid, grid_);
  require_same_grid(s.u2.grid, grid_);
  ComplexField2D g1(grid_), g2(grid_);
  hamiltonian(s.u1.values, g1.values);
  hamiltonian(s.u2.values, g2.values);
  kernels::subtract_interaction(params_.a1, params_.a2, params_.beta, s.u1.values, s.u2.values, g1.values,
                                g2.values);
  return {std::move(g1), std::move(g2)};
}

void GpeProblem::precondition(std::span<const cplx> in, double shift, std::span<cplx> out) {
  if (shift != symbol_shift_) {
    for (std::size_t k = 0; k < k2_.size(); ++k) symbol_[k] = 1.0 / (shift + k2_[k]);
    symbol_shift_ = shift;
  }
  spectral_.apply_symbol(in, symbol_, out);
}

double energy(const TwoComponentState& s, const CouplingParams& params) {
  GpeProblem p(params, s.grid());
  return p.energy(s);
}

std::pair<ComplexField2D, ComplexField2D> el_gradient(const TwoComponentState& s, const CouplingParams& params) {
  GpeProblem p(params, s.grid());
  return p.el_gradient(s);
}

double chemical_potential(const TwoComponentState& s, const CouplingParams& params, double energy_value) {
  return energy_value -
         kernels::interaction_sum(params.a1, params.a2, params.beta, s.u1.values, s.u2.values) * s.grid().cell_area();
}

double GroundState::epsilon() const {
  if (!(mu < 0.0)) throw Error(ErrorCode::DomainViolation, "length scale needs a negative chemical potential");
  return 1.0 / std::sqrt(-mu);
}

GroundState minimize(const CouplingParams& params, double a_star, TwoComponentState init,
                     const MinimizerOptions& opt) {
  require_existence_window(params, a_star);
  require_same_grid(init.u1.grid, init.u2.grid);
  const GridSpec grid = init.grid();
  const std::size_t N = grid.size();
  const double dA = grid.cell_area();
  GpeProblem prob(params, grid);

  using Vec = std::vector<cplx>;
  Vec U(2 * N), HU(2 * N), G(2 * N), R(2 * N), Z(2 * N), TU(2 * N), D(2 * N), Dprev(2 * N), Rprev(2 * N),
      P(2 * N), HP(2 * N), Uold(2 * N), HUold(2 * N);
  auto half = [N](Vec& v, int j) { return std::span<cplx>(v).subspan(j * N, N); };
  auto chalf = [N](const Vec& v, int j) { return std::span<const cplx>(v).subspan(j * N, N); };
  auto ip = [dA](const Vec& a, const Vec& b) { return kernels::dot(a, b) * dA; };
  auto applyH = [&](const Vec& in, Vec& out) {
    prob.hamiltonian(chalf(in, 0), half(out, 0));
    prob.hamiltonian(chalf(in, 1), half(out, 1));
  };
  auto interaction = [&](const Vec& u) {
    return kernels::interaction_sum(params.a1, params.a2, params.beta, chalf(u, 0), chalf(u, 1)) * dA;
  };
  auto load = [&](const TwoComponentState& s) {
    std::copy(s.u1.values.begin(), s.u1.values.end(), U.begin());
    std::copy(s.u2.values.begin(), s.u2.values.end(), U.begin() + static_cast<std::ptrdiff_t>(N));
    kernels::scale(1.0 / std::sqrt(ip(U, U)), U);
    applyH(U, HU);
  };
  auto unload = [&]() {
    TwoComponentState s{ComplexField2D(grid), ComplexField2D(grid)};
    std::copy(U.begin(), U.begin() + static_cast<std::ptrdiff_t>(N), s.u1.values.begin());
    std::copy(U.begin() + static_cast<std::ptrdiff_t>(N), U.end(), s.u2.values.begin());
    return s;
  };
  // Tangent projection: v -= Re<U, v> U
  auto project = [&](Vec& v) { kernels::axpy(-ip(U, v), U, v); };

  load(init);
  double E = ip(U, HU) - interaction(U);
  GroundState out;
  out.energy_history.push_back(E);

  bool have_prev = false, converged = false;
  double rz_prev = 0.0, dE = std::numeric_limits<double>::infinity(), res = 0.0;
  int fails = 0, since_refresh = 0, stage = opt.gauge_fix ? 0 : 1, it = 0;
  for (; it < opt.max_iter; ++it) {
    G = HU;
    kernels::subtract_interaction(params.a1, params.a2, params.beta, chalf(U, 0), chalf(U, 1), half(G, 0),
                                  half(G, 1));
    const double mu = ip(U, G);
    kernels::lincomb(1.0, G, -mu, U, R);
    res = std::sqrt(ip(R, R));
    if (opt.monitor) opt.monitor(it, E, res);
    const double floor = 1e-13 * (std::abs(ip(U, HU)) + std::abs(interaction(U)));
    if (res < opt.tol && std::abs(dE) <= opt.tol * opt.tol * std::abs(E) + floor) {
      if (stage == 0) {
        TwoComponentState s = unload();
        gauge_fix(s, params.omega);
        load(s);
        E = ip(U, HU) - interaction(U);
        have_prev = false;
        since_refresh = 0;
        dE = std::numeric_limits<double>::infinity();
        stage = 1;
        continue;
      }
      converged = true;
      break;
    }

    // Preconditioned tangent residual.
    const double shift = std::max(-mu, 1.0);
    prob.precondition(chalf(G, 0), shift, half(Z, 0));
    prob.precondition(chalf(G, 1), shift, half(Z, 1));
    prob.precondition(chalf(U, 0), shift, half(TU, 0));
    prob.precondition(chalf(U, 1), shift, half(TU, 1));
    const double sigma = ip(U, Z) / ip(U, TU);
    kernels::axpy(-sigma, TU, Z);
    const double rz = ip(R, Z);

    kernels::lincomb(-1.0, Z, 0.0, Z, D);
    if (have_prev && rz_prev > 0.0) {
      const double beta_pr = std::max(0.0, (rz - ip(Rprev, Z)) / rz_prev);
      kernels::axpy(beta_pr, Dprev, D);
    }
    project(D);
    double slope = ip(G, D);
    if (!(slope < 0.0)) {
      kernels::lincomb(-1.0, Z, 0.0, Z, D);
      project(D);
      slope = ip(G, D);
      have_prev = false;
    }
    if (!(slope < 0.0)) {
      ++fails;
      if (fails > opt.restart_budget) break;
      applyH(U, HU);
      continue;
    }
    const double nd = std::sqrt(ip(D, D));
    kernels::lincomb(1.0 / nd, D, 0.0, D, P);
    applyH(P, HP);

    LineModel lm;
    lm.a = ip(U, HU);
    lm.b = ip(U, HP);
    lm.d = ip(P, HP);
    lm.n = kernels::quartic_coeffs(params.a1, params.a2, params.beta, chalf(U, 0), chalf(P, 0), chalf(U, 1),
                                   chalf(P, 1));
    for (auto& v : lm.n) v *= dA;
    const double th = lm.first_minimum();
    const double c = std::cos(th), s = std::sin(th);

    Uold = U;
    HUold = HU;
    // Transported search direction: nd * dU/dθ at θ.
    kernels::lincomb(-nd * s, U, nd * c, P, Dprev);
    kernels::lincomb(c, Uold, s, P, U);
    kernels::lincomb(c, HUold, s, HP, HU);
    const double inv = 1.0 / std::sqrt(ip(U, U));
    kernels::scale(inv, U);
    kernels::scale(inv, HU);
    project(Dprev);
    if (++since_refresh >= opt.recompute_every) {
      applyH(U, HU);
      since_refresh = 0;
    }
    const double Enew = ip(U, HU) - interaction(U);
    if (Enew > E + floor) {
      U = Uold;
      HU = HUold;
      have_prev = false;
      if (++fails > opt.restart_budget) break;
      continue;
    }
    fails = 0;
    dE = Enew - E;
    E = Enew;
    out.energy_history.push_back(E);
    Rprev = R;
    rz_prev = rz;
    have_prev = true;
  }

  out.state = unload();
  out.iterations = it;
  auto [g1, g2] = prob.el_gradient(out.state);
  out.energy = prob.energy(out.state);
  out.mu = chemical_potential(out.state, params, out.energy);
  out.mu_multiplier = real_inner(out.state.u1, g1) + real_inner(out.state.u2, g2);
  for (std::size_t k = 0; k < N; ++k) {
    g1.values[k] -= out.mu_multiplier * out.state.u1.values[k];
    g2.values[k] -= out.mu_multiplier * out.state.u2.values[k];
  }
  out.el_residual = std::sqrt(integrate_abs2(g1) + integrate_abs2(g2));
  out.converged = converged;
  out.peak = locate_peak(out.state, true);
  if (!converged && opt.throw_on_failure) {
    const bool stalled = fails > opt.restart_budget;
    throw Error(stalled ? ErrorCode::Stagnation : ErrorCode::MaxIterations,
                std::string(stalled ? "energy stopped decreasing" : "iteration limit reached") + " after " +
                    std::to_string(it) + " iterations with residual " + std::to_string(res));
  }
  return out;
}

void gauge_fix(TwoComponentState& s, double omega, Point2* peak) {
  Point2 p = locate_peak(s, true);
  const double angle = 0.5 * kPi - std::atan2(p.x2, p.x1);
  if (std::abs(angle) > 1e-15) {
    s.u1 = rotate(s.u1, angle);
    s.u2 = rotate(s.u2, angle);
    p = locate_peak(s, true);
  }
  const GridSpec& g = s.grid();
  const double w = 0.5 * omega * p.x2;
  for (ComplexField2D* u : {&s.u1, &s.u2}) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      const cplx ph = std::polar(1.0, w * g.coord(i));
      for (std::size_t j = 0; j < g.n; ++j) acc += ph * u->at(i, j) * std::abs(u->at(i, j));
    }
    const cplx rot = std::polar(1.0, -std::arg(acc));
    for (auto& v : u->values) v *= rot;
  }
  normalize(s);
  if (peak) *peak = p;
}

TwoComponentState predicted_initial_state(const CouplingParams& params, const ExpansionConstants& c,
                                          const RadialSolitonProfile& profile, const GridSpec& grid) {
  const double alpha = alpha_beta(params, c);
  const double eps = predicted_epsilon(alpha, c);
  const auto [r1, r2] = rho_jbeta(params, c.a_star);
  const Point2 x0{0.0, 1.0 + c.A * alpha * alpha};
  TwoComponentState s{ComplexField2D(grid), ComplexField2D(grid)};
  const double amp = 1.0 / (std::sqrt(c.a_star) * eps);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y1 = grid.coord(i);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double y2 = grid.coord(j);
      const double r = std::hypot(y1 - x0.x1, y2 - x0.x2) / eps;
      const double q = r < profile.r_max() ? profile.value(r) : 0.0;
      // exp(iΩ/2 y·x0⊥) with x0⊥ = (-x0.x2, x0.x1)
      const cplx ph = std::polar(1.0, 0.5 * params.omega * (-y1 * x0.x2 + y2 * x0.x1));
      s.u1.at(i, j) = r1 * amp * q * ph;
      s.u2.at(i, j) = r2 * amp * q * ph;
    }
  }
  normalize(s);
  return s;
}

TwoComponentState gaussian_initial_state(const GridSpec& grid, Point2 center, double width, double gamma1) {
  TwoComponentState s{ComplexField2D(grid), ComplexField2D(grid)};
  const double s1 = std::sqrt(gamma1), s2 = std::sqrt(1.0 - gamma1);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double y1 = grid.coord(i) - center.x1;
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double y2 = grid.coord(j) - center.x2;
      const double gv = std::exp(-(y1 * y1 + y2 * y2) / (2.0 * width * width));
      s.u1.at(i, j) = s1 * gv;
      s.u2.at(i, j) = s2 * gv;
    }
  }
  normalize(s);
  return s;
}

double aligned_distance(const TwoComponentState& a, const TwoComponentState& b) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < 2; ++j) {
    const ComplexField2D& ua = j == 0 ? a.u1 : a.u2;
    const ComplexField2D& ub = j == 0 ? b.u1 : b.u2;
    require_same_grid(ua.grid, ub.grid);
    const cplx rot = std::polar(1.0, -std::arg(complex_inner(ua, ub)));
    double acc = 0.0;
    for (std::size_t k = 0; k < ua.size(); ++k) acc += std::norm(ub.values[k] * rot - ua.values[k]);
    num += acc * ua.grid.cell_area();
    den += integrate_abs2(ua);
  }
  return std::sqrt(num / den);
}

UniquenessReport uniqueness_probe(const CouplingParams& params, double a_star, int n_inits,
                                  const MinimizerOptions& options, const GridSpec& grid, std::uint64_t seed) {
  if (n_inits < 2) throw Error(ErrorCode::InsufficientPoints, "uniqueness probe needs at least two starts");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  const double g1 = gammas(params.a1, params.a2, a_star).first;
  UniquenessReport rep;
  MinimizerOptions opt = options;
  opt.gauge_fix = true;
  opt.throw_on_failure = true;
  for (int r = 0; r < n_inits; ++r) {
    const double phi = angle(rng), t1 = angle(rng), t2 = angle(rng);
    TwoComponentState init = gaussian_initial_state(grid, {std::cos(phi), std::sin(phi)}, 0.35, g1);
    for (auto& v : init.u1.values) v *= std::polar(1.0, t1);
    for (auto& v : init.u2.values) v *= std::polar(1.0, t2);
    rep.runs.push_back(minimize(params, a_star, std::move(init), opt));
  }
  for (int i = 0; i < n_inits; ++i)
    for (int j = i + 1; j < n_inits; ++j) {
      const double d = aligned_distance(rep.runs[i].state, rep.runs[j].state);
      rep.pairwise_distances.push_back(d);
      rep.max_distance = std::max(rep.max_distance, d);
    }
  return rep;
}

}  // namespace ringbec
