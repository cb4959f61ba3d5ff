#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ringbec/config.hpp"
#include "ringbec/error.hpp"
#include "ringbec/pipeline.hpp"

using namespace ringbec;

int main(int argc, char** argv) {
  CLI::App app{"Spike ground states of rotating two-component condensates in a ring trap"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string outdir;
  int workers = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "flat key = value run configuration");
  app.add_option("--outdir", outdir, "artifact directory (overrides io.outdir)");
  app.add_option("--workers", workers, "threads for field kernels (overrides workers)")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", verbose, "progress messages");

  app.add_subcommand("soliton", "solve the radial soliton and check its identities");
  app.add_subcommand("expand", "correction profiles and expansion constants");
  app.add_subcommand("sweep", "minimize along beta_frac_list with continuation");
  app.add_subcommand("report", "blow-up diagnostics, rate fits and tables");
  app.add_subcommand("all", "every stage in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    PipelineContext ctx;
    ctx.config = config_path.empty() ? parse_config("") : load_config(config_path);
    if (!outdir.empty()) ctx.config.io_outdir = outdir;
    if (workers > 0) ctx.config.workers = workers;
    ctx.outdir = ctx.config.io_outdir;
    ctx.verbose = verbose;
    ctx.out = &std::cout;
    if (verbose) std::cout << "config " << config_hash(ctx.config) << "\n" << canonical_text(ctx.config);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "soliton") return cmd_soliton(ctx);
    if (cmd == "expand") return cmd_expand(ctx);
    if (cmd == "sweep") return cmd_sweep(ctx);
    if (cmd == "report") return cmd_report(ctx);
    return cmd_all(ctx);
  } catch (const Error& e) {
    const int rc = exit_code_for(e.code());
    std::cerr << error_json(std::string(error_code_name(e.code())), e.what(), rc) << "\n";
    return rc;
  } catch (const std::exception& e) {
    std::cerr << error_json("Internal", e.what(), 1) << "\n";
    return 1;
  }
}
