#pragma once

#include <filesystem>
#include <vector>

#include "ringbec/field.hpp"

namespace ringbec {

// Positive radial solution Q of -ΔQ + Q - Q^3 = 0 in the plane.
struct RadialSolitonProfile {
  std::vector<double> r_nodes;
  std::vector<double> q_values;
  std::vector<double> q_derivs;
  std::vector<double> q_second;
  double tail_amplitude = 0.0;
  double shoot_height = 0.0;
  // The integrated shot is blended into the closed tail on [matching_radius, blend_end].
  double matching_radius = 0.0;
  double blend_end = 0.0;

  double r_max() const { return r_nodes.back(); }

  struct Jet {
    double q, dq, d2q;
  };
  // Quintic Hermite interpolation up to blend_end, closed tail form beyond.
  Jet jet(double r) const;
  double value(double r) const { return jet(r).q; }
};

struct SolitonOptions {
  double r_max = 20.0;
  double tol = 1e-12;
  double dr = 1.0 / 400.0;
  double bracket_lo = 1.5;
  double bracket_hi = 3.0;
  int max_bisections = 200;
};

RadialSolitonProfile solve_soliton(double r_max, double tol);
RadialSolitonProfile solve_soliton(const SolitonOptions& opts);

// a* = 2π ∫ Q(r)^2 r dr
double soliton_mass(const RadialSolitonProfile& p);

struct SolitonIdentities {
  double mass = 0.0;        // ∫Q^2
  double half_quartic = 0.0;  // ½∫Q^4
  double dirichlet = 0.0;   // ∫|∇Q|^2
  double max_relative_gap() const;
};
SolitonIdentities soliton_identities(const RadialSolitonProfile& p);

enum class MomentWeight { R2, R4, X2Sq, X2SqR2, X2Pow4 };
double radial_moment(const RadialSolitonProfile& p, MomentWeight w);

enum class DerivativeOrder { Value = 0, Gradient = 1, Hessian = 2 };

// Order 0: {Q}; order 1: {∂1Q, ∂2Q}; order 2: {∂11Q, ∂12Q, ∂21Q, ∂22Q}.
std::vector<ComplexField2D> rasterize(const RadialSolitonProfile& p, const GridSpec& grid, Point2 center,
                                      DerivativeOrder order);
ComplexField2D rasterize_q(const RadialSolitonProfile& p, const GridSpec& grid, Point2 center = {});

void write_profile_csv(const std::filesystem::path& path, const RadialSolitonProfile& p,
                       const std::string& config_hash = "");

}  // namespace ringbec
