#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ringbec/field.hpp"

namespace ringbec {

// FFT-based derivatives on the periodic box. Holds plans and scratch buffers,
// so one instance must not be shared between threads without synchronization.
class Spectral {
 public:
  explicit Spectral(const GridSpec& grid);
  ~Spectral();
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const GridSpec& grid() const;
  // Angular wavenumbers in FFT order, Nyquist stored at index n/2 as -n/2.
  const std::vector<double>& wavenumbers() const;

  void forward(std::span<const cplx> in, std::span<cplx> out);
  // Normalized inverse.
  void inverse(std::span<const cplx> in, std::span<cplx> out);

  void laplacian(std::span<const cplx> u, std::span<cplx> out);
  void gradient(std::span<const cplx> u, std::span<cplx> d1, std::span<cplx> d2);
  void derivatives(std::span<const cplx> u, std::span<cplx> lap, std::span<cplx> d1, std::span<cplx> d2);
  // out = F^-1[symbol * F u]; symbol laid out like the 2-D spectrum.
  void apply_symbol(std::span<const cplx> u, std::span<const double> symbol, std::span<cplx> out);
  // |k|^2 on the 2-D spectrum.
  std::vector<double> k2_symbol() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ComplexField2D laplacian(const ComplexField2D& f);
std::pair<ComplexField2D, ComplexField2D> gradient(const ComplexField2D& f);

// Fourier interpolation onto a grid with the same extent and a different n.
ComplexField2D resample(const ComplexField2D& f, std::size_t n);

// Rotation about the origin: out(x) = f(R(-angle) x). Quarter turns are exact
// index permutations; the remainder uses three FFT shears.
ComplexField2D rotate(const ComplexField2D& f, double angle);

// Tensor cubic B-spline interpolant with FFT prefiltering (periodic).
// Points outside the box evaluate to zero.
class SplineSampler {
 public:
  explicit SplineSampler(const ComplexField2D& f);
  cplx operator()(double y1, double y2) const;
  bool inside(double y1, double y2) const;
  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  std::vector<cplx> coeff_;
};

}  // namespace ringbec
