#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>

#include "ringbec/field.hpp"
#include "ringbec/soliton.hpp"

namespace ringbec {

struct CouplingParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double beta = 0.0;
  double omega = 0.0;
};

struct ExpansionConstants {
  double a_star = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double beta_star = 0.0;
  double A = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double B3 = 0.0;
  double B4 = 0.0;
  double omega = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

std::pair<double, double> gammas(double a1, double a2, double a_star);
double beta_star(double a1, double a2, double a_star);

// Existence window 0 < a_j < a*, 0 < beta < beta*, omega > 0.
void require_existence_window(const CouplingParams& p, double a_star);
// Additionally beta > max(a1, a2), needed for the limit amplitudes.
void require_blowup_window(const CouplingParams& p, double a_star);

double alpha_beta(const CouplingParams& p, const ExpansionConstants& c);
std::pair<double, double> rho_jbeta(const CouplingParams& p, double a_star);

double constant_A(const RadialSolitonProfile& profile);
// psi1 must be real up to 1e-8 and live on a grid that holds Q.
std::array<double, 4> constants_B(const RadialSolitonProfile& profile, const ComplexField2D& psi1,
                                  const CouplingParams& p, const ExpansionConstants& partial);

// a*, gammas, beta*, A from the profile; B1..B4 from psi1.
ExpansionConstants make_constants(const RadialSolitonProfile& profile, const ComplexField2D& psi1, double a1,
                                  double a2, double omega);

ComplexField2D profile_C(int order, const RadialSolitonProfile& profile, const ComplexField2D& psi1,
                         const ExpansionConstants& c, const GridSpec& grid);

double predicted_epsilon(double alpha, const ExpansionConstants& c);
double predicted_peak_offset(double epsilon, double A);

// rho_j (Q + alpha^2 C1 + alpha^4 C2) truncated at the given order (0, 2 or 4); psi1 is needed at order 4.
ComplexField2D predicted_blowup_profile(int j, const CouplingParams& p, const ExpansionConstants& c,
                                        const RadialSolitonProfile& profile, const ComplexField2D* psi1,
                                        const GridSpec& grid, int order = 4);

std::pair<ComplexField2D, ComplexField2D> limit_pair(const CouplingParams& p, const RadialSolitonProfile& profile,
                                                     const GridSpec& grid);

struct QuadratureCrossCheck {
  double A_radial = 0.0, A_grid = 0.0;
  double B1_radial = 0.0, B1_grid = 0.0;
  double B2_radial = 0.0, B2_grid = 0.0;
  double max_relative_gap() const;
};
QuadratureCrossCheck cross_check_quadrature(const RadialSolitonProfile& profile, const GridSpec& grid, double omega);

// B2 as stated versus the difference of the two unconsolidated virial integrals.
struct B2Consolidation {
  double stated = 0.0;
  double lhs_integral = 0.0;  // ∫(|x|^4 + 8A|x|^2 + 4A^2) Q^2
  double rhs_integral = 0.0;  // ∫(3|x|^4 + 16A|x|^2 + 4A^2) Q^2
  double relative_gap = 0.0;
};
B2Consolidation b2_consolidation(const RadialSolitonProfile& profile, const GridSpec& grid);

void write_constants_json(const std::filesystem::path& path, const ExpansionConstants& c,
                          const std::string& config_hash = "");
ExpansionConstants read_constants_json(const std::filesystem::path& path);

}  // namespace ringbec
