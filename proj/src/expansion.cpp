#include "ringbec/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include "json.hpp"

#include "ringbec/error.hpp"

namespace ringbec {

namespace {

void require_coupling(double a, double a_star, const char* name) {
  if (!(a > 0.0 && a < a_star))
    throw Error(ErrorCode::DomainViolation,
                std::string(name) + " = " + std::to_string(a) + " must lie in (0, a*) with a* = " + std::to_string(a_star));
}

// ∫ w(x) Q(x)^2 over the grid, Q rasterized at the origin.
template <class W>
double grid_moment(const ComplexField2D& q, W w) {
  const GridSpec& g = q.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x1 = g.coord(i);
    for (std::size_t j = 0; j < g.n; ++j) {
      const double x2 = g.coord(j);
      s += w(x1, x2) * std::norm(q.at(i, j));
    }
  }
  return s * g.cell_area();
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

std::pair<double, double> gammas(double a1, double a2, double a_star) {
  require_coupling(a1, a_star, "a1");
  require_coupling(a2, a_star, "a2");
  const double s1 = std::sqrt(a_star - a1), s2 = std::sqrt(a_star - a2);
  return {1.0 - s1 / (s1 + s2), 1.0 - s2 / (s1 + s2)};
}

double beta_star(double a1, double a2, double a_star) {
  require_coupling(a1, a_star, "a1");
  require_coupling(a2, a_star, "a2");
  return a_star + std::sqrt((a_star - a1) * (a_star - a2));
}

void require_existence_window(const CouplingParams& p, double a_star) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::WindowViolation, msg); };
  if (!(p.a1 > 0.0 && p.a1 < a_star)) fail("a1 outside (0, a*)");
  if (!(p.a2 > 0.0 && p.a2 < a_star)) fail("a2 outside (0, a*)");
  const double bs = beta_star(p.a1, p.a2, a_star);
  if (!(p.beta > 0.0 && p.beta < bs))
    fail("beta = " + std::to_string(p.beta) + " outside (0, beta*) with beta* = " + std::to_string(bs));
  if (!(p.omega > 0.0 && std::isfinite(p.omega))) fail("omega must be positive and finite");
}

void require_blowup_window(const CouplingParams& p, double a_star) {
  require_existence_window(p, a_star);
  if (!(p.beta > std::max(p.a1, p.a2)))
    throw Error(ErrorCode::WindowViolation, "beta must exceed max(a1, a2)");
}

double alpha_beta(const CouplingParams& p, const ExpansionConstants& c) {
  if (!(p.beta <= c.beta_star))
    throw Error(ErrorCode::DomainViolation, "alpha_beta needs beta <= beta*");
  const double m2 = -c.A * c.a_star;
  const double a4 = 8.0 * c.gamma1 * c.gamma2 * (c.beta_star - p.beta) / ((p.omega * p.omega + 8.0) * m2);
  return std::pow(a4, 0.25);
}

std::pair<double, double> rho_jbeta(const CouplingParams& p, double a_star) {
  if (!(p.beta > std::max(p.a1, p.a2)))
    throw Error(ErrorCode::DomainViolation, "rho needs beta > max(a1, a2)");
  const double d = p.beta * p.beta - p.a1 * p.a2;
  return {std::sqrt(a_star * (p.beta - p.a2) / d), std::sqrt(a_star * (p.beta - p.a1) / d)};
}

double constant_A(const RadialSolitonProfile& profile) {
  return -radial_moment(profile, MomentWeight::R2) / soliton_mass(profile);
}

std::array<double, 4> constants_B(const RadialSolitonProfile& profile, const ComplexField2D& psi1,
                                  const CouplingParams& p, const ExpansionConstants& partial) {
  const double m2 = radial_moment(profile, MomentWeight::R2);
  const double m4 = radial_moment(profile, MomentWeight::R4);
  const double w = p.omega * p.omega;
  const double B1 = (w + 8.0) / 4.0 * m2;
  const double B2 = 2.0 * (m4 + 4.0 * partial.A * m2);

  const ComplexField2D q = rasterize_q(profile, psi1.grid);
  double imag = 0.0;
  for (const auto& v : psi1.values) imag = std::max(imag, std::abs(v.imag()));
  if (imag > 1e-8 * std::max(1.0, sup_norm(psi1)))
    throw Error(ErrorCode::DomainViolation,
                "first correction carries imaginary content " + std::to_string(imag) + " above 1e-8");
  const GridSpec& g = psi1.grid;
  double s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x1 = g.coord(i);
    for (std::size_t j = 0; j < g.n; ++j) {
      const double x2 = g.coord(j);
      s += (0.25 * w * (x1 * x1 + x2 * x2) + 4.0 * x2 * x2) * q.at(i, j).real() * psi1.at(i, j).real();
    }
  }
  const double B3 = 3.0 * s * g.cell_area();

  const double g1 = partial.gamma1, g2 = partial.gamma2;
  const double B4 = B3 / B1 + (1.0 - 4.0 * g1 * g2) * B1 /
                                  ((2.0 * partial.beta_star - p.a1 - p.a2) * 4.0 * g1 * g1 * g2 * g2);
  return {B1, B2, B3, B4};
}

ExpansionConstants make_constants(const RadialSolitonProfile& profile, const ComplexField2D& psi1, double a1,
                                  double a2, double omega) {
  ExpansionConstants c;
  c.a_star = soliton_mass(profile);
  std::tie(c.gamma1, c.gamma2) = gammas(a1, a2, c.a_star);
  c.beta_star = beta_star(a1, a2, c.a_star);
  c.A = constant_A(profile);
  c.omega = omega;
  c.a1 = a1;
  c.a2 = a2;
  const auto b = constants_B(profile, psi1, CouplingParams{a1, a2, c.beta_star, omega}, c);
  c.B1 = b[0];
  c.B2 = b[1];
  c.B3 = b[2];
  c.B4 = b[3];
  return c;
}

ComplexField2D profile_C(int order, const RadialSolitonProfile& profile, const ComplexField2D& psi1,
                         const ExpansionConstants& c, const GridSpec& grid) {
  if (order != 1 && order != 2) throw Error(ErrorCode::DomainViolation, "profile_C order must be 1 or 2");
  const auto q = rasterize(profile, grid, {}, DerivativeOrder::Value);
  const auto d = rasterize(profile, grid, {}, DerivativeOrder::Gradient);
  std::vector<ComplexField2D> hess;
  if (order == 2) {
    require_same_grid(psi1.grid, grid);
    hess = rasterize(profile, grid, {}, DerivativeOrder::Hessian);
  }
  const double b11 = c.B1 * c.B1, b22 = c.B2 * c.B2;
  const double k1 = c.B2 / (4.0 * c.B1);
  const double kd = (8.0 * b11 * c.B4 - 7.0 * b22) / (32.0 * b11);
  const double kh = b22 / (32.0 * b11);
  const double kg = b22 / (16.0 * b11);
  ComplexField2D out(grid);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x1 = grid.coord(i);
    for (std::size_t j = 0; j < grid.n; ++j) {
      const double x2 = grid.coord(j);
      const std::size_t k = i * grid.n + j;
      const double qv = q[0].values[k].real();
      const double xg = x1 * d[0].values[k].real() + x2 * d[1].values[k].real();
      if (order == 1) {
        out.values[k] = k1 * (qv + xg);
        continue;
      }
      const double xhx = x1 * x1 * hess[0].values[k].real() + x1 * x2 * hess[1].values[k].real() +
                         x2 * x1 * hess[2].values[k].real() + x2 * x2 * hess[3].values[k].real();
      out.values[k] = kd * (qv + xg) + kh * xhx + kg * xg + psi1.values[k];
    }
  }
  return out;
}

double predicted_epsilon(double alpha, const ExpansionConstants& c) {
  const double r = c.B2 / c.B1;
  const double a2 = alpha * alpha;
  return alpha * (1.0 - 0.25 * r * a2 + (9.0 * r * r - 8.0 * c.B4) / 32.0 * a2 * a2);
}

double predicted_peak_offset(double epsilon, double A) {
  const double e2 = epsilon * epsilon;
  return A * e2 - 0.5 * A * A * e2 * e2;
}

ComplexField2D predicted_blowup_profile(int j, const CouplingParams& p, const ExpansionConstants& c,
                                        const RadialSolitonProfile& profile, const ComplexField2D* psi1,
                                        const GridSpec& grid, int order) {
  if (j != 1 && j != 2) throw Error(ErrorCode::DomainViolation, "component index must be 1 or 2");
  if (order != 0 && order != 2 && order != 4) throw Error(ErrorCode::DomainViolation, "order must be 0, 2 or 4");
  if (order == 4 && !psi1) throw Error(ErrorCode::MissingPrerequisite, "fourth-order prediction needs psi1");
  const auto [r1, r2] = rho_jbeta(p, c.a_star);
  const double rho = j == 1 ? r1 : r2;
  const double alpha = alpha_beta(p, c);
  ComplexField2D out = rasterize_q(profile, grid);
  if (order >= 2) {
    const ComplexField2D c1 = profile_C(1, profile, psi1 ? *psi1 : out, c, grid);
    for (std::size_t k = 0; k < out.size(); ++k) out.values[k] += alpha * alpha * c1.values[k];
  }
  if (order >= 4) {
    const ComplexField2D c2 = profile_C(2, profile, *psi1, c, grid);
    const double a4 = std::pow(alpha, 4);
    for (std::size_t k = 0; k < out.size(); ++k) out.values[k] += a4 * c2.values[k];
  }
  for (auto& v : out.values) v *= rho;
  return out;
}

std::pair<ComplexField2D, ComplexField2D> limit_pair(const CouplingParams& p, const RadialSolitonProfile& profile,
                                                     const GridSpec& grid) {
  const auto [r1, r2] = rho_jbeta(p, soliton_mass(profile));
  ComplexField2D u1 = rasterize_q(profile, grid);
  ComplexField2D u2 = u1;
  for (auto& v : u1.values) v *= r1;
  for (auto& v : u2.values) v *= r2;
  return {std::move(u1), std::move(u2)};
}

double QuadratureCrossCheck::max_relative_gap() const {
  return std::max({rel_gap(A_radial, A_grid), rel_gap(B1_radial, B1_grid), rel_gap(B2_radial, B2_grid)});
}

QuadratureCrossCheck cross_check_quadrature(const RadialSolitonProfile& profile, const GridSpec& grid, double omega) {
  const ComplexField2D q = rasterize_q(profile, grid);
  const double w = (omega * omega + 8.0) / 4.0;
  QuadratureCrossCheck out;
  const double m0r = soliton_mass(profile);
  const double m2r = radial_moment(profile, MomentWeight::R2);
  const double m4r = radial_moment(profile, MomentWeight::R4);
  const double m0g = grid_moment(q, [](double, double) { return 1.0; });
  const double m2g = grid_moment(q, [](double x1, double x2) { return x1 * x1 + x2 * x2; });
  const double m4g = grid_moment(q, [](double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    return r2 * r2;
  });
  out.A_radial = -m2r / m0r;
  out.A_grid = -m2g / m0g;
  out.B1_radial = w * m2r;
  out.B1_grid = w * m2g;
  out.B2_radial = 2.0 * (m4r + 4.0 * out.A_radial * m2r);
  out.B2_grid = 2.0 * (m4g + 4.0 * out.A_grid * m2g);
  return out;
}

B2Consolidation b2_consolidation(const RadialSolitonProfile& profile, const GridSpec& grid) {
  const double A = constant_A(profile);
  B2Consolidation out;
  out.stated = 2.0 * (radial_moment(profile, MomentWeight::R4) + 4.0 * A * radial_moment(profile, MomentWeight::R2));
  const ComplexField2D q = rasterize_q(profile, grid);
  out.lhs_integral = grid_moment(q, [A](double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    return r2 * r2 + 8.0 * A * r2 + 4.0 * A * A;
  });
  out.rhs_integral = grid_moment(q, [A](double x1, double x2) {
    const double r2 = x1 * x1 + x2 * x2;
    return 3.0 * r2 * r2 + 16.0 * A * r2 + 4.0 * A * A;
  });
  out.relative_gap = rel_gap(out.stated, out.rhs_integral - out.lhs_integral);
  return out;
}

void write_constants_json(const std::filesystem::path& path, const ExpansionConstants& c,
                          const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["a_star"] = c.a_star;
  j["gamma1"] = c.gamma1;
  j["gamma2"] = c.gamma2;
  j["beta_star"] = c.beta_star;
  j["A"] = c.A;
  j["B1"] = c.B1;
  j["B2"] = c.B2;
  j["B3"] = c.B3;
  j["B4"] = c.B4;
  j["omega"] = c.omega;
  j["a1"] = c.a1;
  j["a2"] = c.a2;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

ExpansionConstants read_constants_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingPrerequisite, "missing constants file " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    ExpansionConstants c;
    c.a_star = j.at("a_star");
    c.gamma1 = j.at("gamma1");
    c.gamma2 = j.at("gamma2");
    c.beta_star = j.at("beta_star");
    c.A = j.at("A");
    c.B1 = j.at("B1");
    c.B2 = j.at("B2");
    c.B3 = j.at("B3");
    c.B4 = j.at("B4");
    c.omega = j.at("omega");
    c.a1 = j.at("a1");
    c.a2 = j.at("a2");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, "bad constants file " + path.string() + ": " + e.what());
  }
}

}  // namespace ringbec
