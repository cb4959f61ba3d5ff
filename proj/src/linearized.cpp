#include "ringbec/linearized.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ringbec/error.hpp"
#include "ringbec/kernels.hpp"

namespace ringbec {

namespace {

ComplexField2D normalized(ComplexField2D f) {
  const double nrm = l2_norm(f);
  kernels::scale(1.0 / nrm, f.values);
  return f;
}

}  // namespace

LinearizedSolver::LinearizedSolver(const RadialSolitonProfile& profile, const GridSpec& grid)
    : q_(rasterize_q(profile, grid)) {
  auto g = rasterize(profile, grid, {}, DerivativeOrder::Gradient);
  init(std::array<ComplexField2D, 2>{std::move(g[0]), std::move(g[1])});
}

LinearizedSolver::LinearizedSolver(const ComplexField2D& q_field) : q_(q_field) { init(std::nullopt); }

void LinearizedSolver::init(std::optional<std::array<ComplexField2D, 2>> grad) {
  const GridSpec& g = q_.grid;
  spectral_ = std::make_unique<Spectral>(g);
  if (grad) {
    grad_q_ = std::move(*grad);
  } else {
    grad_q_ = {ComplexField2D(g), ComplexField2D(g)};
    spectral_->gradient(q_.values, grad_q_[0].values, grad_q_[1].values);
    for (auto& d : grad_q_)
      for (auto& v : d.values) v = v.real();
  }
  q2_.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) q2_[k] = std::norm(q_.values[k]);
  ComplexField2D iq(g);
  for (std::size_t k = 0; k < g.size(); ++k) iq.values[k] = cplx(0.0, q_.values[k].real());
  basis_ = KernelBasis{normalized(std::move(iq)), normalized(grad_q_[0]), normalized(grad_q_[1])};
  precond_symbol_ = spectral_->k2_symbol();
  for (auto& s : precond_symbol_) s = 1.0 / (1.0 + s);
  scratch_.resize(g.size());
}

void LinearizedSolver::apply_raw(std::span<const cplx> in, std::span<cplx> out) {
  spectral_->laplacian(in, scratch_);
  for (std::size_t k = 0; k < in.size(); ++k)
    out[k] = -scratch_[k] + (1.0 - q2_[k]) * in[k] - 2.0 * q2_[k] * in[k].real();
}

ComplexField2D LinearizedSolver::apply(const ComplexField2D& phi) {
  require_same_grid(phi.grid, q_.grid);
  ComplexField2D out(phi.grid);
  apply_raw(phi.values, out.values);
  return out;
}

void LinearizedSolver::project_inplace(std::span<cplx> f) const {
  const double dA = q_.grid.cell_area();
  for (const ComplexField2D* e : basis_.elements()) {
    const double c = kernels::dot(e->values, f) * dA;
    kernels::axpy(-c, e->values, f);
  }
}

ComplexField2D LinearizedSolver::project(const ComplexField2D& f) const {
  ComplexField2D out = f;
  project_inplace(out.values);
  return out;
}

namespace {

// Preconditioned MINRES for a symmetric operator in the real inner product
// Re Σ conj(a) b. Returns the iteration count.
template <class ApplyA, class ApplyM>
int minres(ApplyA&& A, ApplyM&& M, std::span<const cplx> b, std::span<cplx> x, double rtol, int max_iter) {
  const std::size_t n = b.size();
  std::vector<cplx> r1(b.begin(), b.end()), r2(b.begin(), b.end()), y(n), v(n), w(n, 0.0), w1(n, 0.0),
      w2(n, 0.0);
  std::fill(x.begin(), x.end(), cplx(0.0));
  M(r1, y);
  double beta1 = kernels::dot(r1, y);
  if (beta1 <= 0.0) return 0;
  beta1 = std::sqrt(beta1);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  int itn = 0;
  while (itn < max_iter) {
    ++itn;
    const double s = 1.0 / beta;
    for (std::size_t k = 0; k < n; ++k) v[k] = s * y[k];
    A(v, y);
    if (itn >= 2) kernels::axpy(-beta / oldb, r1, y);
    const double alfa = kernels::dot(v, y);
    kernels::axpy(-alfa / beta, r2, y);
    std::swap(r1, r2);
    r2 = y;
    M(r2, y);
    oldb = beta;
    beta = kernels::dot(r2, y);
    if (beta < 0.0) throw Error(ErrorCode::NonConvergence, "preconditioner is not positive definite");
    beta = std::sqrt(beta);
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    const double denom = 1.0 / gamma;
    std::swap(w1, w2);  // w1 <- old w2
    std::swap(w2, w);   // w2 <- old w
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) * denom;
      x[k] += phi * w[k];
    }
    if (phibar <= rtol * beta1 || beta == 0.0) break;
  }
  return itn;
}

}  // namespace

ConstrainedSolution LinearizedSolver::solve(const ComplexField2D& rhs, const ConstrainedSolveOptions& opts) {
  require_same_grid(rhs.grid, q_.grid);
  const GridSpec& g = q_.grid;
  ConstrainedSolution out;
  out.psi = ComplexField2D(g);
  const double rhs_norm = l2_norm(rhs);
  if (rhs_norm == 0.0) return out;

  ComplexField2D prhs = project(rhs);
  std::vector<cplx> diff(g.size());
  kernels::lincomb(1.0, rhs.values, -1.0, prhs.values, diff);
  out.kernel_projection = std::sqrt(kernels::norm_sq(diff) * g.cell_area()) / rhs_norm;
  if (out.kernel_projection > opts.fredholm_tol)
    throw Error(ErrorCode::RhsNotInRange, "right-hand side has kernel component " +
                                              std::to_string(out.kernel_projection) + " relative");

  std::vector<cplx> tmp(g.size());
  auto A = [&](std::span<const cplx> in, std::span<cplx> o) {
    std::copy(in.begin(), in.end(), tmp.begin());
    project_inplace(tmp);
    apply_raw(tmp, o);
    project_inplace(o);
  };
  auto M = [&](std::span<const cplx> in, std::span<cplx> o) {
    std::copy(in.begin(), in.end(), tmp.begin());
    project_inplace(tmp);
    spectral_->apply_symbol(tmp, precond_symbol_, o);
    project_inplace(o);
  };

  // MINRES on the residual, restarted until the true residual meets tol.
  std::vector<cplx> res(prhs.values), dx(g.size()), lx(g.size());
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    out.iterations += minres(A, M, res, dx, opts.tol, opts.max_iter);
    kernels::axpy(1.0, dx, out.psi.values);
    A(out.psi.values, lx);
    kernels::lincomb(1.0, prhs.values, -1.0, lx, res);
    out.residual = std::sqrt(kernels::norm_sq(res) * g.cell_area()) / rhs_norm;
    if (out.residual <= 10.0 * opts.tol) break;
  }
  project_inplace(out.psi.values);
  pin(out.psi, opts);

  // residual of the unprojected operator against the projected data
  apply_raw(out.psi.values, lx);
  kernels::lincomb(1.0, prhs.values, -1.0, lx, res);
  out.residual = std::sqrt(kernels::norm_sq(res) * g.cell_area()) / rhs_norm;
  if (out.residual > 1e-6)
    throw Error(ErrorCode::NonConvergence, "constrained solve stalled at relative residual " +
                                               std::to_string(out.residual));

  const std::size_t c = g.n / 2;
  double gim = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) gim += out.psi.values[k].imag() * q_.values[k].real();
  out.gauge_pin = gim * g.cell_area();
  std::vector<cplx> d1(g.size()), d2(g.size());
  spectral_->gradient(out.psi.values, d1, d2);
  out.gradient_pin = std::hypot(d1[c * g.n + c].real(), d2[c * g.n + c].real());
  return out;
}

void LinearizedSolver::pin(ComplexField2D& psi, const ConstrainedSolveOptions& opts) {
  const GridSpec& g = q_.grid;
  const std::size_t origin = (g.n / 2) * g.n + g.n / 2;
  // gauge: ∫ Im(ψ) Q = 0
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    num += psi.values[k].imag() * q_.values[k].real();
    den += q2_[k];
  }
  const double c0 = -num / den;
  for (std::size_t k = 0; k < g.size(); ++k) psi.values[k] += cplx(0.0, c0 * q_.values[k].real());

  // translation: ∇Re ψ(0) + H c = 0 with H the origin Hessian of the discrete Q
  std::vector<cplx> d1(g.size()), d2(g.size());
  spectral_->gradient(psi.values, d1, d2);
  Eigen::Vector2d grad(d1[origin].real(), d2[origin].real());
  Eigen::Matrix2d H;
  for (int l = 0; l < 2; ++l) {
    spectral_->gradient(grad_q_[static_cast<std::size_t>(l)].values, d1, d2);
    H(0, l) = d1[origin].real();
    H(1, l) = d2[origin].real();
  }
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(H);
  const auto sv = svd.singularValues();
  if (sv(1) == 0.0 || sv(0) / sv(1) > opts.pinning_cond_max)
    throw Error(ErrorCode::SingularPinning, "origin Hessian of Q is ill-conditioned");
  const Eigen::Vector2d c = H.colPivHouseholderQr().solve(-grad);
  for (std::size_t k = 0; k < g.size(); ++k)
    psi.values[k] += c(0) * grad_q_[0].values[k] + c(1) * grad_q_[1].values[k];
}

ComplexField2D LinearizedSolver::rhs(int k, double A, double omega, const ComplexField2D* psi1) {
  const GridSpec& g = q_.grid;
  ComplexField2D f(g);
  std::vector<cplx> d1, d2;
  if (k == 3) {
    if (!psi1) throw Error(ErrorCode::DomainViolation, "the third correction needs the first one");
    require_same_grid(psi1->grid, g);
    d1.resize(g.size());
    d2.resize(g.size());
    spectral_->gradient(psi1->values, d1, d2);
  } else if (k != 1 && k != 2) {
    throw Error(ErrorCode::DomainViolation, "correction index must be 1, 2 or 3");
  }
  const double w2 = 0.25 * omega * omega;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x1 = g.coord(i);
    for (std::size_t j = 0; j < g.n; ++j) {
      const double x2 = g.coord(j), r2 = x1 * x1 + x2 * x2;
      const std::size_t idx = i * g.n + j;
      const double q = q_.values[idx].real();
      switch (k) {
        case 1: f.values[idx] = -(w2 * r2 + 4.0 * x2 * x2) * q; break;
        case 2: f.values[idx] = -(4.0 * r2 + 8.0 * A) * x2 * q; break;
        default: {
          const double poly = r2 * r2 + 4.0 * A * r2 + 8.0 * A * x2 * x2 + 4.0 * A * A;
          const cplx rot = -x2 * d1[idx] + x1 * d2[idx];
          f.values[idx] = -poly * q - cplx(0.0, omega) * rot;
        }
      }
    }
  }
  return f;
}

ConstrainedSolution LinearizedSolver::compute_psi(int k, double A, double omega, const ComplexField2D* psi1,
                                                  const ConstrainedSolveOptions& opts) {
  return solve(rhs(k, A, omega, psi1), opts);
}

ComplexField2D apply_L(const ComplexField2D& field, const ComplexField2D& q_field) {
  require_same_grid(field.grid, q_field.grid);
  ComplexField2D lap = laplacian(field);
  ComplexField2D out(field.grid);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double q2 = std::norm(q_field.values[k]);
    out.values[k] = -lap.values[k] + (1.0 - q2) * field.values[k] - 2.0 * q2 * field.values[k].real();
  }
  return out;
}

ComplexField2D solve_constrained(const ComplexField2D& rhs, const ComplexField2D& q_field,
                                 const ConstrainedSolveOptions& opts) {
  LinearizedSolver s(q_field);
  return s.solve(rhs, opts).psi;
}

ComplexField2D compute_psi_k(int k, const ComplexField2D& q_field, double A, double omega,
                             const ComplexField2D* psi1, const ConstrainedSolveOptions& opts) {
  LinearizedSolver s(q_field);
  return s.compute_psi(k, A, omega, psi1, opts).psi;
}

}  // namespace ringbec
