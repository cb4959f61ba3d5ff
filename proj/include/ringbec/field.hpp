#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace ringbec {

using cplx = std::complex<double>;

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;
};

// Uniform square grid {(-L + i h, -L + j h)}, h = 2L/n. Node (i, j) is stored at
// i * n + j, so x2 is the fast index. The origin sits at node (n/2, n/2).
struct GridSpec {
  std::size_t n = 0;
  double extent = 0.0;

  double h() const { return 2.0 * extent / static_cast<double>(n); }
  // (i - n/2) h keeps coord(mirror(i)) == -coord(i) bit for bit.
  double coord(std::size_t i) const { return (static_cast<double>(i) - 0.5 * static_cast<double>(n)) * h(); }
  std::size_t size() const { return n * n; }
  double cell_area() const { return h() * h(); }
  // Index of x -> -x along one axis.
  std::size_t mirror(std::size_t i) const { return (n - i) % n; }
  bool operator==(const GridSpec&) const = default;
};

// Throws ExtentTooSmall/GridMismatch style errors for non power-of-two or empty grids.
void validate_grid(const GridSpec& grid);
void require_same_grid(const GridSpec& a, const GridSpec& b);

struct ComplexField2D {
  GridSpec grid;
  std::vector<cplx> values;

  ComplexField2D() = default;
  explicit ComplexField2D(GridSpec g);
  ComplexField2D(GridSpec g, std::vector<cplx> v);

  cplx& at(std::size_t i, std::size_t j) { return values[i * grid.n + j]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[i * grid.n + j]; }
  std::size_t size() const { return values.size(); }
};

// Trapezoid (periodic) quadrature helpers.
double integrate_abs2(const ComplexField2D& f);
// Re ∫ conj(a) b
double real_inner(const ComplexField2D& a, const ComplexField2D& b);
cplx complex_inner(const ComplexField2D& a, const ComplexField2D& b);
double l2_norm(const ComplexField2D& f);
double sup_norm(const ComplexField2D& f);
double boundary_ring_max(const ComplexField2D& f);

// f(-x1, x2) and f(x1, -x2), exact index maps on the symmetric grid.
ComplexField2D reflect_x1(const ComplexField2D& f);
ComplexField2D reflect_x2(const ComplexField2D& f);
ComplexField2D conjugate(const ComplexField2D& f);

struct FieldHeader {
  std::size_t n = 0;
  double extent = 0.0;
  std::string kind;
  std::string units;
  std::string config_hash;
};

void write_field(const std::filesystem::path& path, const ComplexField2D& f, const std::string& kind,
                 const std::string& units = "dimensionless", const std::string& config_hash = "");
ComplexField2D read_field(const std::filesystem::path& path, FieldHeader* header = nullptr);

}  // namespace ringbec
