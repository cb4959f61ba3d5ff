#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ringbec/config.hpp"

namespace ringbec {

// Artifact layout below the output directory:
//   soliton/  profile.csv, soliton.json
//   expand/   psi1.field, psi2.field, psi3.field, constants.json, expand.json
//   sweep/    beta_<frac>/{u1.field, u2.field, run.json}, summary.json
//   report/   report.json, report.csv, summary.txt
struct PipelineContext {
  RunConfig config;
  std::filesystem::path outdir;
  bool verbose = false;
  std::ostream* out = nullptr;  // human-readable progress and summaries
};

// Each stage returns its exit code (0 or 1) and throws Error for failures that
// abort the stage.
int cmd_soliton(const PipelineContext& ctx);
int cmd_expand(const PipelineContext& ctx);
int cmd_sweep(const PipelineContext& ctx);
int cmd_report(const PipelineContext& ctx);
int cmd_all(const PipelineContext& ctx);

// One-line machine-readable description of an error.
std::string error_json(const std::string& code, const std::string& message, int exit_code);

// Directory name of one sweep point, e.g. beta_0.95.
std::string sweep_dir_name(double beta_frac);

}  // namespace ringbec
