#include "ringbec/spectral.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include <fftw3.h>

#include "ringbec/error.hpp"

namespace ringbec {

namespace {

std::vector<double> make_wavenumbers(const GridSpec& g) {
  const std::size_t n = g.n;
  const double dk = std::numbers::pi / g.extent;
  std::vector<double> k(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto sm = static_cast<double>(m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n));
    k[m] = dk * sm;
  }
  return k;
}

struct FftwBuffer {
  fftw_complex* p = nullptr;
  explicit FftwBuffer(std::size_t count) : p(fftw_alloc_complex(count)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  cplx* data() { return reinterpret_cast<cplx*>(p); }
};

}  // namespace

struct Spectral::Impl {
  GridSpec grid;
  std::vector<double> k;
  FftwBuffer in, out, spec;
  fftw_plan fwd = nullptr, bwd = nullptr;

  explicit Impl(const GridSpec& g) : grid(g), k(make_wavenumbers(g)), in(g.size()), out(g.size()), spec(g.size()) {
    const int n = static_cast<int>(g.n);
    fwd = fftw_plan_dft_2d(n, n, in.p, out.p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(n, n, in.p, out.p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Impl() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  void to_spectrum(std::span<const cplx> u) {
    std::memcpy(in.data(), u.data(), u.size_bytes());
    fftw_execute(fwd);
    std::memcpy(spec.data(), out.data(), u.size_bytes());
  }
  // Inverse of spec * multiplier(m1, m2) into dst.
  template <class F>
  void from_spectrum(F&& mult, std::span<cplx> dst) {
    const std::size_t n = grid.n;
    const double norm = 1.0 / static_cast<double>(grid.size());
    cplx* s = spec.data();
    cplx* b = in.data();
    for (std::size_t m1 = 0; m1 < n; ++m1)
      for (std::size_t m2 = 0; m2 < n; ++m2) b[m1 * n + m2] = s[m1 * n + m2] * mult(m1, m2) * norm;
    fftw_execute(bwd);
    std::memcpy(dst.data(), out.data(), dst.size_bytes());
  }
};

Spectral::Spectral(const GridSpec& grid) {
  validate_grid(grid);
  impl_ = std::make_unique<Impl>(grid);
}
Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

const GridSpec& Spectral::grid() const { return impl_->grid; }
const std::vector<double>& Spectral::wavenumbers() const { return impl_->k; }

void Spectral::forward(std::span<const cplx> in, std::span<cplx> out) {
  std::memcpy(impl_->in.data(), in.data(), in.size_bytes());
  fftw_execute(impl_->fwd);
  std::memcpy(out.data(), impl_->out.data(), out.size_bytes());
}

void Spectral::inverse(std::span<const cplx> in, std::span<cplx> out) {
  const double norm = 1.0 / static_cast<double>(impl_->grid.size());
  cplx* b = impl_->in.data();
  for (std::size_t k = 0; k < in.size(); ++k) b[k] = in[k] * norm;
  fftw_execute(impl_->bwd);
  std::memcpy(out.data(), impl_->out.data(), out.size_bytes());
}

void Spectral::laplacian(std::span<const cplx> u, std::span<cplx> out) {
  impl_->to_spectrum(u);
  const auto& k = impl_->k;
  impl_->from_spectrum([&](std::size_t a, std::size_t b) { return cplx(-(k[a] * k[a] + k[b] * k[b]), 0.0); }, out);
}

void Spectral::gradient(std::span<const cplx> u, std::span<cplx> d1, std::span<cplx> d2) {
  impl_->to_spectrum(u);
  const auto& k = impl_->k;
  const std::size_t nyq = impl_->grid.n / 2;
  // The Nyquist mode has no odd counterpart; its first derivative is dropped.
  impl_->from_spectrum([&](std::size_t a, std::size_t) { return a == nyq ? cplx(0.0) : cplx(0.0, k[a]); }, d1);
  impl_->from_spectrum([&](std::size_t, std::size_t b) { return b == nyq ? cplx(0.0) : cplx(0.0, k[b]); }, d2);
}

void Spectral::derivatives(std::span<const cplx> u, std::span<cplx> lap, std::span<cplx> d1, std::span<cplx> d2) {
  impl_->to_spectrum(u);
  const auto& k = impl_->k;
  const std::size_t nyq = impl_->grid.n / 2;
  impl_->from_spectrum([&](std::size_t a, std::size_t b) { return cplx(-(k[a] * k[a] + k[b] * k[b]), 0.0); }, lap);
  impl_->from_spectrum([&](std::size_t a, std::size_t) { return a == nyq ? cplx(0.0) : cplx(0.0, k[a]); }, d1);
  impl_->from_spectrum([&](std::size_t, std::size_t b) { return b == nyq ? cplx(0.0) : cplx(0.0, k[b]); }, d2);
}

void Spectral::apply_symbol(std::span<const cplx> u, std::span<const double> symbol, std::span<cplx> out) {
  impl_->to_spectrum(u);
  const std::size_t n = impl_->grid.n;
  impl_->from_spectrum([&](std::size_t a, std::size_t b) { return cplx(symbol[a * n + b], 0.0); }, out);
}

std::vector<double> Spectral::k2_symbol() const {
  const std::size_t n = impl_->grid.n;
  const auto& k = impl_->k;
  std::vector<double> s(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) s[a * n + b] = k[a] * k[a] + k[b] * k[b];
  return s;
}

ComplexField2D laplacian(const ComplexField2D& f) {
  Spectral sp(f.grid);
  ComplexField2D out(f.grid);
  sp.laplacian(f.values, out.values);
  return out;
}

std::pair<ComplexField2D, ComplexField2D> gradient(const ComplexField2D& f) {
  Spectral sp(f.grid);
  ComplexField2D d1(f.grid), d2(f.grid);
  sp.gradient(f.values, d1.values, d2.values);
  return {std::move(d1), std::move(d2)};
}

ComplexField2D resample(const ComplexField2D& f, std::size_t n) {
  const std::size_t m = f.grid.n;
  if (n == m) return f;
  GridSpec target{n, f.grid.extent};
  validate_grid(target);
  Spectral src(f.grid), dst(target);
  std::vector<cplx> spec(f.size());
  src.forward(f.values, spec);
  std::vector<cplx> out_spec(target.size(), cplx(0.0));
  const std::size_t keep = std::min(n, m) / 2;  // modes |q| < keep copied as-is
  auto src_index = [&](long q) { return static_cast<std::size_t>(q < 0 ? q + static_cast<long>(m) : q); };
  auto dst_index = [&](long q) { return static_cast<std::size_t>(q < 0 ? q + static_cast<long>(n) : q); };
  const long lk = static_cast<long>(keep);
  const double scale = static_cast<double>(target.size()) / static_cast<double>(f.size());
  for (long q1 = -lk + 1; q1 < lk; ++q1)
    for (long q2 = -lk + 1; q2 < lk; ++q2)
      out_spec[dst_index(q1) * n + dst_index(q2)] = spec[src_index(q1) * m + src_index(q2)] * scale;
  ComplexField2D out(target);
  dst.inverse(out_spec, out.values);
  return out;
}

namespace {

ComplexField2D quarter_turns(const ComplexField2D& f, int q) {
  q = ((q % 4) + 4) % 4;
  ComplexField2D cur = f;
  const std::size_t n = f.grid.n;
  for (int t = 0; t < q; ++t) {
    ComplexField2D next(f.grid);
    // out(x1, x2) = f(x2, -x1)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next.at(i, j) = cur.at(j, f.grid.mirror(i));
    cur = std::move(next);
  }
  return cur;
}

// out(x) = f(x1 + a x2, x2) when along_x1, else f(x1, x2 + a x1).
void shear(ComplexField2D& f, double a, bool along_x1) {
  const std::size_t n = f.grid.n;
  FftwBuffer buf(n), res(n);
  fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(n), buf.p, res.p, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_1d(static_cast<int>(n), res.p, buf.p, FFTW_BACKWARD, FFTW_ESTIMATE);
  const auto k = make_wavenumbers(f.grid);
  const double norm = 1.0 / static_cast<double>(n);
  for (std::size_t line = 0; line < n; ++line) {
    const double shift = a * f.grid.coord(line);
    for (std::size_t t = 0; t < n; ++t) buf.data()[t] = along_x1 ? f.at(t, line) : f.at(line, t);
    fftw_execute(fwd);
    for (std::size_t t = 0; t < n; ++t) {
      if (t == n / 2) {
        res.data()[t] = 0.0;
        continue;
      }
      res.data()[t] *= std::polar(norm, k[t] * shift);
    }
    fftw_execute(bwd);
    for (std::size_t t = 0; t < n; ++t) (along_x1 ? f.at(t, line) : f.at(line, t)) = buf.data()[t];
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
}

}  // namespace

ComplexField2D rotate(const ComplexField2D& f, double angle) {
  const double quarter = std::numbers::pi / 2.0;
  const long q = std::lround(angle / quarter);
  const double r = angle - static_cast<double>(q) * quarter;
  ComplexField2D out = quarter_turns(f, static_cast<int>(q));
  if (r == 0.0) return out;
  // f(R(-r) x) with R(-r) = Sx(a) Sy(b) Sx(a), a = tan(r/2), b = -sin(r)
  const double a = std::tan(0.5 * r), b = -std::sin(r);
  shear(out, a, true);
  shear(out, b, false);
  shear(out, a, true);
  return out;
}

SplineSampler::SplineSampler(const ComplexField2D& f) : grid_(f.grid), coeff_(f.size()) {
  const std::size_t n = grid_.n;
  Spectral sp(grid_);
  std::vector<double> symbol(grid_.size());
  std::vector<double> b1(n);
  for (std::size_t m = 0; m < n; ++m)
    b1[m] = (4.0 + 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n))) / 6.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) symbol[a * n + b] = 1.0 / (b1[a] * b1[b]);
  sp.apply_symbol(f.values, symbol, coeff_);
}

bool SplineSampler::inside(double y1, double y2) const {
  const double L = grid_.extent;
  return y1 >= -L && y1 <= L && y2 >= -L && y2 <= L;
}

cplx SplineSampler::operator()(double y1, double y2) const {
  if (!inside(y1, y2)) return 0.0;
  const std::size_t n = grid_.n;
  const double h = grid_.h(), L = grid_.extent;
  auto weights = [](double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = (1.0 - u) * (1.0 - u) * (1.0 - u) / 6.0;
    w[1] = (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0;
    w[2] = (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0;
    w[3] = u3 / 6.0;
  };
  const double t1 = (y1 + L) / h, t2 = (y2 + L) / h;
  const double f1 = std::floor(t1), f2 = std::floor(t2);
  double w1[4], w2[4];
  weights(t1 - f1, w1);
  weights(t2 - f2, w2);
  const long i0 = static_cast<long>(f1) - 1, j0 = static_cast<long>(f2) - 1;
  const long ln = static_cast<long>(n);
  cplx acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const std::size_t i = static_cast<std::size_t>(((i0 + a) % ln + ln) % ln);
    cplx row = 0.0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t j = static_cast<std::size_t>(((j0 + b) % ln + ln) % ln);
      row += w2[b] * coeff_[i * n + j];
    }
    acc += w1[a] * row;
  }
  return acc;
}

}  // namespace ringbec
