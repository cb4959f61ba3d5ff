#pragma once

#include <array>
#include <memory>
#include <optional>

#include "ringbec/field.hpp"
#include "ringbec/soliton.hpp"
#include "ringbec/spectral.hpp"

namespace ringbec {

// iQ, ∂1Q, ∂2Q, each scaled to unit L2 norm.
struct KernelBasis {
  ComplexField2D gauge;
  ComplexField2D shift1;
  ComplexField2D shift2;
  std::array<const ComplexField2D*, 3> elements() const { return {&gauge, &shift1, &shift2}; }
};

// Lφ = -Δφ + φ - Q²φ - 2 Re(Qφ) Q for real Q.
ComplexField2D apply_L(const ComplexField2D& field, const ComplexField2D& q_field);

struct ConstrainedSolveOptions {
  double tol = 1e-12;        // relative residual target for the projected system
  int max_iter = 4000;
  int max_restarts = 4;
  double fredholm_tol = 1e-4;
  double pinning_cond_max = 1e8;
};

struct ConstrainedSolution {
  ComplexField2D psi;
  double residual = 0.0;            // ‖Lψ - P rhs‖ / ‖rhs‖
  double kernel_projection = 0.0;   // ‖rhs - P rhs‖ / ‖rhs‖
  double gauge_pin = 0.0;           // Re∫ψ conj(iQ)
  double gradient_pin = 0.0;        // |∇Re ψ(0)|
  int iterations = 0;
};

class LinearizedSolver {
 public:
  // Q and its gradient rasterized analytically from the profile.
  LinearizedSolver(const RadialSolitonProfile& profile, const GridSpec& grid);
  // Q given on the grid; the kernel basis is built from spectral derivatives.
  explicit LinearizedSolver(const ComplexField2D& q_field);

  const GridSpec& grid() const { return q_.grid; }
  const ComplexField2D& q() const { return q_; }
  const KernelBasis& basis() const { return basis_; }

  ComplexField2D apply(const ComplexField2D& phi);
  // Projection onto the orthogonal complement of the kernel basis.
  ComplexField2D project(const ComplexField2D& f) const;
  ConstrainedSolution solve(const ComplexField2D& rhs, const ConstrainedSolveOptions& opts = {});

  // Right-hand sides f_1, f_2, f_3 of the correction equations.
  ComplexField2D rhs(int k, double A, double omega, const ComplexField2D* psi1);
  ConstrainedSolution compute_psi(int k, double A, double omega, const ComplexField2D* psi1,
                                  const ConstrainedSolveOptions& opts = {});

 private:
  void init(std::optional<std::array<ComplexField2D, 2>> grad);
  void apply_raw(std::span<const cplx> in, std::span<cplx> out);
  void project_inplace(std::span<cplx> f) const;
  void pin(ComplexField2D& psi, const ConstrainedSolveOptions& opts);

  ComplexField2D q_;
  std::array<ComplexField2D, 2> grad_q_;
  KernelBasis basis_;
  std::unique_ptr<Spectral> spectral_;
  std::vector<double> q2_;
  std::vector<double> precond_symbol_;
  std::vector<cplx> scratch_;
};

ComplexField2D solve_constrained(const ComplexField2D& rhs, const ComplexField2D& q_field,
                                 const ConstrainedSolveOptions& opts = {});
ComplexField2D compute_psi_k(int k, const ComplexField2D& q_field, double A, double omega,
                             const ComplexField2D* psi1 = nullptr, const ConstrainedSolveOptions& opts = {});

}  // namespace ringbec
