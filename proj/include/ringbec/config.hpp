#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ringbec/field.hpp"

namespace ringbec {

enum class InitMode { Predicted, Gaussian, Resume };

// Flat `key = value` run configuration. Couplings a1 and a2 are given in units
// of a*, sweep points as fractions of β*.
struct RunConfig {
  double a1 = 0.5;
  double a2 = 0.7;
  double omega = 1.0;
  std::vector<double> beta_frac_list{0.90, 0.93, 0.95};
  std::size_t grid_n = 256;
  double grid_extent = 4.0;
  double solver_tol = 1e-8;
  int solver_max_iter = 20000;
  std::uint64_t solver_seed = 7;
  InitMode init_mode = InitMode::Predicted;
  std::string io_outdir = "out";
  std::size_t blowup_n = 256;
  double blowup_extent = 20.0;
  std::vector<std::string> report_formats{"json", "csv"};
  double soliton_r_max = 20.0;
  int workers = 1;

  GridSpec lab_grid() const { return {grid_n, grid_extent}; }
  GridSpec blowup_grid() const { return {blowup_n, blowup_extent}; }
  bool wants_format(const std::string& f) const;
};

// Throws ConfigError on syntax errors, unknown or repeated keys and invalid values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// One key per line in a fixed order, numbers in shortest round-trip form.
std::string canonical_text(const RunConfig& c);
// 16 hex digits of FNV-1a over the canonical text, with io.outdir and workers
// reset to their defaults.
std::string config_hash(const RunConfig& c);
// Hash of the settings that determine one sweep point given its warm start:
// ignores init.mode, beta_frac_list and report.formats as well.
std::string run_hash(const RunConfig& c);

std::string init_mode_name(InitMode m);

}  // namespace ringbec
