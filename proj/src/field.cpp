#include "ringbec/field.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "ringbec/error.hpp"
#include "ringbec/kernels.hpp"

static_assert(std::endian::native == std::endian::little, "field format assumes a little-endian host");

namespace ringbec {

void validate_grid(const GridSpec& grid) {
  if (grid.n < 4 || !std::has_single_bit(grid.n))
    throw Error(ErrorCode::GridMismatch, "grid size must be a power of two >= 4, got " + std::to_string(grid.n));
  if (!(grid.extent > 0.0)) throw Error(ErrorCode::GridMismatch, "grid extent must be positive");
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b))
    throw Error(ErrorCode::GridMismatch, "fields live on different grids (n=" + std::to_string(a.n) + ", L=" +
                                             std::to_string(a.extent) + " vs n=" + std::to_string(b.n) +
                                             ", L=" + std::to_string(b.extent) + ")");
}

ComplexField2D::ComplexField2D(GridSpec g) : grid(g), values(g.size(), cplx(0.0, 0.0)) { validate_grid(g); }

ComplexField2D::ComplexField2D(GridSpec g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  validate_grid(g);
  if (values.size() != g.size()) throw Error(ErrorCode::GridMismatch, "value count does not match grid");
}

double integrate_abs2(const ComplexField2D& f) { return kernels::norm_sq(f.values) * f.grid.cell_area(); }

double real_inner(const ComplexField2D& a, const ComplexField2D& b) {
  require_same_grid(a.grid, b.grid);
  return kernels::dot(a.values, b.values) * a.grid.cell_area();
}

cplx complex_inner(const ComplexField2D& a, const ComplexField2D& b) {
  require_same_grid(a.grid, b.grid);
  return kernels::cdot(a.values, b.values) * a.grid.cell_area();
}

double l2_norm(const ComplexField2D& f) { return std::sqrt(integrate_abs2(f)); }

double sup_norm(const ComplexField2D& f) { return kernels::max_abs(f.values); }

double boundary_ring_max(const ComplexField2D& f) {
  const std::size_t n = f.grid.n;
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    m = std::max({m, std::abs(f.at(0, k)), std::abs(f.at(n - 1, k)), std::abs(f.at(k, 0)), std::abs(f.at(k, n - 1))});
  }
  return m;
}

ComplexField2D reflect_x1(const ComplexField2D& f) {
  ComplexField2D out(f.grid);
  const std::size_t n = f.grid.n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = f.at(f.grid.mirror(i), j);
  return out;
}

ComplexField2D reflect_x2(const ComplexField2D& f) {
  ComplexField2D out(f.grid);
  const std::size_t n = f.grid.n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = f.at(i, f.grid.mirror(j));
  return out;
}

ComplexField2D conjugate(const ComplexField2D& f) {
  ComplexField2D out = f;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

void write_field(const std::filesystem::path& path, const ComplexField2D& f, const std::string& kind,
                 const std::string& units, const std::string& config_hash) {
  nlohmann::ordered_json header;
  header["n"] = f.grid.n;
  header["extent"] = f.grid.extent;
  header["kind"] = kind;
  header["units"] = units;
  if (!config_hash.empty()) header["config_hash"] = config_hash;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  const std::string line = header.dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

ComplexField2D read_field(const std::filesystem::path& path, FieldHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingPrerequisite, "cannot open field file " + path.string());
  std::string line;
  std::getline(in, line);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, "bad field header in " + path.string() + ": " + e.what());
  }
  GridSpec grid{h.at("n").get<std::size_t>(), h.at("extent").get<double>()};
  ComplexField2D f(grid);
  in.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
  if (in.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(cplx)))
    throw Error(ErrorCode::IoError, "truncated field file " + path.string());
  if (header) {
    header->n = grid.n;
    header->extent = grid.extent;
    header->kind = h.value("kind", "");
    header->units = h.value("units", "");
    header->config_hash = h.value("config_hash", "");
  }
  return f;
}

}  // namespace ringbec
