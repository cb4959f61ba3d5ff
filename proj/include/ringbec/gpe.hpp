#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ringbec/expansion.hpp"
#include "ringbec/field.hpp"
#include "ringbec/spectral.hpp"

namespace ringbec {

struct TwoComponentState {
  ComplexField2D u1;
  ComplexField2D u2;

  const GridSpec& grid() const { return u1.grid; }
  double total_mass() const { return integrate_abs2(u1) + integrate_abs2(u2); }
};

// Rescales both components by one factor so that the total mass is one.
void normalize(TwoComponentState& s);

// (|x|^2 - 1)^2 + Ω^2 |x|^2 / 4 on the grid.
std::vector<double> effective_potential(const GridSpec& grid, double omega);

// Energy, first variation and the closed-form line energy for one parameter set
// on one grid. Holds FFT plans, so an instance belongs to one thread.
class GpeProblem {
 public:
  GpeProblem(const CouplingParams& params, const GridSpec& grid);

  const CouplingParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }

  // out = -Δu + iΩ x⊥·∇u + (|x|^2-1)^2 u + Ω^2|x|^2/4 u
  void hamiltonian(std::span<const cplx> u, std::span<cplx> out);
  // Re∫ conj(u) H u summed over both components, minus the interaction integral.
  double energy(const TwoComponentState& s);
  // Same value through |(∇ - iΩ/2 x⊥)u|^2.
  double energy_covariant(const TwoComponentState& s);
  double interaction(const TwoComponentState& s) const;
  std::pair<ComplexField2D, ComplexField2D> el_gradient(const TwoComponentState& s);
  // out = (shift - Δ)^{-1} in
  void precondition(std::span<const cplx> in, double shift, std::span<cplx> out);

 private:
  CouplingParams params_;
  GridSpec grid_;
  Spectral spectral_;
  std::vector<double> potential_;
  std::vector<cplx> lap_, d1_, d2_;
  std::vector<double> k2_, symbol_;
  double symbol_shift_ = -1.0;
};

double energy(const TwoComponentState& s, const CouplingParams& params);
std::pair<ComplexField2D, ComplexField2D> el_gradient(const TwoComponentState& s, const CouplingParams& params);
// e - ∫(a1/2 |u1|^4 + a2/2 |u2|^4 + β|u1|^2|u2|^2)
double chemical_potential(const TwoComponentState& s, const CouplingParams& params, double energy_value);

struct MinimizerOptions {
  double tol = 1e-8;      // constrained residual ‖g - μu‖
  int max_iter = 20000;
  int recompute_every = 25;  // exact H u refresh period
  int restart_budget = 50;   // consecutive failed steps before giving up
  bool gauge_fix = true;
  bool throw_on_failure = true;  // otherwise return with converged = false
  // Called once per iteration with (iteration, energy, residual).
  std::function<void(int, double, double)> monitor;
};

struct GroundState {
  TwoComponentState state;
  double energy = 0.0;
  double mu = 0.0;             // from the energy and interaction integrals
  double mu_multiplier = 0.0;  // Re<g, u>
  double el_residual = 0.0;
  int iterations = 0;
  Point2 peak;
  bool converged = false;
  std::vector<double> energy_history;

  double epsilon() const;
};

// Preconditioned Riemannian conjugate gradient on the unit total-mass sphere
// with exact line search along great circles.
GroundState minimize(const CouplingParams& params, double a_star, TwoComponentState init,
                     const MinimizerOptions& options = {});

// Rotates the plane so the density peak sits on the positive x2-axis and
// removes a constant phase from each component.
void gauge_fix(TwoComponentState& s, double omega, Point2* peak = nullptr);

// Predicted profiles scaled back to the lab frame and centred at (0, 1 + A α^2).
TwoComponentState predicted_initial_state(const CouplingParams& params, const ExpansionConstants& c,
                                          const RadialSolitonProfile& profile, const GridSpec& grid);
// Gaussians of width w at the given point, masses split by γ.
TwoComponentState gaussian_initial_state(const GridSpec& grid, Point2 center, double width, double gamma1);

struct UniquenessReport {
  std::vector<GroundState> runs;
  std::vector<double> pairwise_distances;  // aligned relative L2 distances, i < j order
  double max_distance = 0.0;
};

// Minimizes from n_inits random phases and positions on the unit circle
// (deterministic in seed), then aligns and compares all pairs.
UniquenessReport uniqueness_probe(const CouplingParams& params, double a_star, int n_inits,
                                  const MinimizerOptions& options, const GridSpec& grid, std::uint64_t seed = 7);

// Relative distance after optimizing one constant phase per component.
double aligned_distance(const TwoComponentState& a, const TwoComponentState& b);

}  // namespace ringbec
