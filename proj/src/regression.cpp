#include "ringbec/regression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "ringbec/error.hpp"

namespace ringbec {

double PolyFit::operator()(double x) const {
  double y = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * x + *it;
  return y;
}

PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree, double confidence) {
  const int n = static_cast<int>(x.size());
  if (y.size() != x.size()) throw Error(ErrorCode::InsufficientPoints, "x and y lengths differ");
  if (degree < 0 || n <= degree)
    throw Error(ErrorCode::InsufficientPoints,
                "polynomial fit of degree " + std::to_string(degree) + " needs more than " + std::to_string(degree) +
                    " points, got " + std::to_string(n));
  const int m = degree + 1;
  // Columns scaled to unit max so the Vandermonde stays well conditioned.
  double xmax = 0.0;
  for (double v : x) xmax = std::max(xmax, std::abs(v));
  if (xmax == 0.0) xmax = 1.0;
  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double t = 1.0;
    for (int k = 0; k < m; ++k) {
      V(i, k) = t;
      t *= x[i] / xmax;
    }
    b(i) = y[i];
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  const Eigen::VectorXd c = qr.solve(b);
  const Eigen::VectorXd r = b - V * c;

  PolyFit fit;
  fit.degree = degree;
  fit.points = n;
  fit.confidence = confidence;
  fit.residual_rms = std::sqrt(r.squaredNorm() / n);
  const int dof = n - m;
  const double s2 = dof > 0 ? r.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov = s2 * (V.transpose() * V).inverse();
  double t_crit = std::numeric_limits<double>::infinity();
  if (dof > 0) {
    boost::math::students_t dist(dof);
    t_crit = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence)));
  }
  double scale = 1.0;
  for (int k = 0; k < m; ++k) {
    fit.coeffs.push_back(c(k) / scale);
    const double se = std::sqrt(std::max(cov(k, k), 0.0)) / scale;
    fit.std_errors.push_back(se);
    fit.half_widths.push_back(t_crit * se);
    scale *= xmax;
  }
  return fit;
}

}  // namespace ringbec
