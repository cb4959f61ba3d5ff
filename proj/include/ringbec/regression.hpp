#pragma once

#include <vector>

namespace ringbec {

// Least-squares polynomial y = Σ c_k x^k with two-sided Student-t intervals.
struct PolyFit {
  std::vector<double> coeffs;
  std::vector<double> std_errors;
  std::vector<double> half_widths;  // at the requested confidence
  int degree = 0;
  int points = 0;
  double residual_rms = 0.0;
  double confidence = 0.95;

  double intercept() const { return coeffs.at(0); }
  double slope() const { return coeffs.at(1); }
  double operator()(double x) const;
};

// Throws InsufficientPoints when points <= degree.
PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree, double confidence = 0.95);

}  // namespace ringbec
