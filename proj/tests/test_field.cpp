#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "ringbec/error.hpp"
#include "ringbec/field.hpp"

using namespace ringbec;

TEST_CASE("grid geometry is symmetric about the origin") {
  GridSpec g{64, 3.0};
  CHECK(g.coord(32) == 0.0);
  CHECK(g.coord(0) == -3.0);
  for (std::size_t i = 1; i < 64; ++i) CHECK(g.coord(g.mirror(i)) == -g.coord(i));
}

TEST_CASE("non power-of-two grids are rejected") {
  CHECK_THROWS_AS(ComplexField2D(GridSpec{48, 1.0}), Error);
  CHECK_NOTHROW(ComplexField2D(GridSpec{64, 1.0}));
}

TEST_CASE("field files round-trip bit-exactly") {
  GridSpec g{16, 2.5};
  ComplexField2D f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f.values[k] = cplx(std::sin(0.37 * k), 1.0 / (1.0 + k));
  const auto path = std::filesystem::temp_directory_path() / "ringbec_field_roundtrip.field";
  write_field(path, f, "test", "dimensionless", "abc123");
  FieldHeader h;
  ComplexField2D back = read_field(path, &h);
  CHECK(back.grid == g);
  CHECK(back.values == f.values);
  CHECK(h.kind == "test");
  CHECK(h.config_hash == "abc123");
  std::filesystem::remove(path);
}

TEST_CASE("reflections are involutions and inner products are hermitian") {
  GridSpec g{16, 1.0};
  ComplexField2D f(g), w(g);
  for (std::size_t k = 0; k < f.size(); ++k) {
    f.values[k] = cplx(std::cos(0.1 * k), std::sin(0.3 * k));
    w.values[k] = cplx(1.0 / (2.0 + k), 0.2);
  }
  CHECK(reflect_x1(reflect_x1(f)).values == f.values);
  CHECK(reflect_x2(reflect_x2(f)).values == f.values);
  const cplx a = complex_inner(f, w), b = complex_inner(w, f);
  CHECK(std::abs(a - std::conj(b)) < 1e-14);
  CHECK(real_inner(f, f) == doctest::Approx(integrate_abs2(f)));
}
