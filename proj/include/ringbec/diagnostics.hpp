#pragma once

#include <optional>
#include <vector>

#include "ringbec/expansion.hpp"
#include "ringbec/gpe.hpp"
#include "ringbec/regression.hpp"

namespace ringbec {

// Argmax of |u1|^2 + |u2|^2 refined by a paraboloid fit on the 3x3 stencil.
// With polish, Newton steps on the trigonometric interpolant of the density follow.
Point2 locate_peak(const TwoComponentState& s, bool polish = false);
Point2 locate_peak(const ComplexField2D& density, bool polish = false);

struct BlowupFrame {
  ComplexField2D v1;
  ComplexField2D v2;
  Point2 x_beta;
  double p_beta = 0.0;
  double epsilon = 0.0;  // length scale actually used
  double theta1 = 0.0;
  double theta2 = 0.0;
};

// v_j(x) = √a* s u_j(s x + x_β) exp(-i(sΩ/2 x·x_β⊥ - θ_j)) with s = (-μ)^(-1/2) unless a
// scale is given. θ_j aligns against the rasterized Q. The lab fields are Fourier
// upsampled before spline sampling; points outside the lab box read as zero.
BlowupFrame to_blowup_frame(const TwoComponentState& s, double mu, const CouplingParams& params,
                            const RadialSolitonProfile& profile, const GridSpec& blowup_grid,
                            std::optional<double> scale = {}, std::optional<Point2> peak = {});

// Phase θ = -arg∫wQ making Re∫(e^{iθ}w)(iQ) = 0 and ∫Re(e^{iθ}w)Q > 0, in [0, 2π).
double alignment_phase(const ComplexField2D& w, const ComplexField2D& q);

struct ExpansionErrors {
  double e0 = 0.0;
  double e2 = 0.0;
  double e4 = 0.0;
  double lemma = 0.0;  // ‖v - ρ(Q + ε^4 ψ1)‖∞ / ε^4 on the ε-scaled frame, when requested
};

// Sup-norm distances of the α-scaled frame to ρ_j Q, ρ_j(Q + α²C1), ρ_j(Q + α²C1 + α⁴C2);
// maximum over both components.
ExpansionErrors expansion_errors(const BlowupFrame& frame, const std::array<ComplexField2D, 2>& order0,
                                 const std::array<ComplexField2D, 2>& order2,
                                 const std::array<ComplexField2D, 2>& order4);
double lemma_error(const BlowupFrame& eps_frame, const std::array<double, 2>& rho, const ComplexField2D& q,
                   const ComplexField2D& psi1);

struct RatePoint {
  double alpha = 0.0;
  double epsilon = 0.0;
  double p_beta = 0.0;
  bool resolved = true;
};

struct RateFit {
  PolyFit eps_ratio;   // ε/α against α^2
  PolyFit peak_shift;  // (p - 1)/ε^2 against ε^2
  int used = 0;
  int excluded = 0;
};

// Points with α > alpha_max or flagged unresolved are excluded. Degree is
// chosen as min(max_degree, used - 2) so every fit keeps a residual dof.
RateFit rate_checks(const std::vector<RatePoint>& points, double alpha_max = 0.5, int max_degree = 3);

struct PohozaevSides {
  double lhs = 0.0;  // nonlinear and mass terms
  double rhs = 0.0;  // trap and rotation terms
};
PohozaevSides pohozaev_sides(const BlowupFrame& frame, const CouplingParams& params, double a_star);
// |L - R| / (|L| + |R|) for the virial identity of the ε-scaled frame.
double pohozaev_residual(const BlowupFrame& frame, const CouplingParams& params, double a_star);

struct ForceBalance {
  double along_x2 = 0.0;
  double along_x1 = 0.0;
};
// ∫∂_k (|x|^2-1)^2 ρ / ∫|∇(|x|^2-1)^2| ρ
ForceBalance force_balance_residual(const TwoComponentState& s);

struct SymmetryDefect {
  double conjugate_reflection = 0.0;  // min_φ ‖conj u(-x1,x2) - e^{iφ} u‖ / ‖u‖
  double plain_reflection = 0.0;      // min_φ ‖u(-x1,x2) - e^{iφ} u‖ / ‖u‖
  std::array<double, 2> phases{};     // optimal φ for the plain reflection
};
// Requires the peak on the positive x2-axis; maxima over components.
SymmetryDefect symmetry_defect(const TwoComponentState& s, double axis_tol = 1e-6);

// Phase winding of u1 around the peak on a circle of the given radius.
int winding_diagnostic(const TwoComponentState& s, double radius, std::optional<Point2> center = {});

}  // namespace ringbec
