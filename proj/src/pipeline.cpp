#include "ringbec/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ringbec/diagnostics.hpp"
#include "ringbec/error.hpp"
#include "ringbec/expansion.hpp"
#include "ringbec/gpe.hpp"
#include "ringbec/kernels.hpp"
#include "ringbec/linearized.hpp"
#include "ringbec/soliton.hpp"

namespace ringbec {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kIdentityTol = 1e-6;
constexpr double kSymmetryFlag = 1e-4;
constexpr double kResolutionRatio = 6.0;

std::string num(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

void write_json(const fs::path& path, const json& j) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingPrerequisite, "missing artifact " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "malformed artifact " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

void say(const PipelineContext& ctx, const std::string& line) {
  if (ctx.out) *ctx.out << line << "\n";
}

void note(const PipelineContext& ctx, const std::string& line) {
  if (ctx.verbose) say(ctx, line);
}

RadialSolitonProfile solve_profile(const RunConfig& cfg) {
  SolitonOptions o;
  o.r_max = cfg.soliton_r_max;
  return solve_soliton(o);
}

CouplingParams params_for(const RunConfig& cfg, const ExpansionConstants& c, double frac) {
  return {cfg.a1 * c.a_star, cfg.a2 * c.a_star, frac * c.beta_star, cfg.omega};
}

json grid_json(const GridSpec& g) { return json{{"n", g.n}, {"extent", g.extent}}; }

void require_stage(const fs::path& marker, const std::string& stage) {
  if (!fs::exists(marker))
    throw Error(ErrorCode::MissingPrerequisite, "run the " + stage + " stage first (missing " + marker.string() + ")");
}

json run_record(const RunConfig& cfg, const std::string& hash, double frac, const CouplingParams& p, double alpha,
                const GroundState& gs) {
  json j;
  j["config_hash"] = hash;
  j["run_hash"] = run_hash(cfg);
  j["beta_frac"] = frac;
  j["params"] = json{{"a1", p.a1}, {"a2", p.a2}, {"beta", p.beta}, {"omega", p.omega}};
  j["grid"] = grid_json(cfg.lab_grid());
  j["alpha"] = alpha;
  j["energy"] = gs.energy;
  j["mu"] = gs.mu;
  j["mu_multiplier"] = gs.mu_multiplier;
  j["epsilon"] = gs.mu < 0.0 ? json(gs.epsilon()) : json(nullptr);
  j["peak"] = json::array({gs.peak.x1, gs.peak.x2});
  j["iterations"] = gs.iterations;
  j["converged"] = gs.converged;
  j["residuals"] = json{{"el", gs.el_residual},
                        {"mass", std::abs(gs.state.total_mass() - 1.0)},
                        {"mu_gap", std::abs(gs.mu - gs.mu_multiplier)}};
  return j;
}

struct SweepRun {
  double frac = 0.0;
  fs::path dir;
  json record;
};

std::vector<SweepRun> converged_runs(const fs::path& sweep_root) {
  const json summary = read_json(sweep_root / "summary.json");
  std::vector<SweepRun> out;
  for (const auto& e : summary.at("runs")) {
    if (e.at("status") != "converged") continue;
    SweepRun r;
    r.frac = e.at("beta_frac");
    r.dir = sweep_root / e.at("dir").get<std::string>();
    r.record = read_json(r.dir / "run.json");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string error_json(const std::string& code, const std::string& message, int exit_code) {
  return json{{"error", code}, {"message", message}, {"exit_code", exit_code}}.dump();
}

std::string sweep_dir_name(double beta_frac) { return "beta_" + num(beta_frac); }

int cmd_soliton(const PipelineContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::string hash = config_hash(cfg);
  const RadialSolitonProfile prof = solve_profile(cfg);
  const SolitonIdentities id = soliton_identities(prof);
  const double a_star = soliton_mass(prof);
  const fs::path dir = ctx.outdir / "soliton";
  fs::create_directories(dir);
  write_profile_csv(dir / "profile.csv", prof, hash);
  json j;
  j["config_hash"] = hash;
  j["a_star"] = a_star;
  j["r_max"] = prof.r_max();
  j["shoot_height"] = prof.shoot_height;
  j["tail_amplitude"] = prof.tail_amplitude;
  j["identities"] = json{{"mass", id.mass},
                         {"half_quartic", id.half_quartic},
                         {"dirichlet", id.dirichlet},
                         {"max_relative_gap", id.max_relative_gap()}};
  const bool pass = id.max_relative_gap() < kIdentityTol;
  j["identities_pass"] = pass;
  write_json(dir / "soliton.json", j);
  say(ctx, "a* = " + num(a_star) + "  identity gap = " + num(id.max_relative_gap()));
  if (!pass)
    throw Error(ErrorCode::NonConvergence, "soliton identity gap " + num(id.max_relative_gap()) + " exceeds 1e-6");
  return 0;
}

int cmd_expand(const PipelineContext& ctx) {
  const RunConfig& cfg = ctx.config;
  require_stage(ctx.outdir / "soliton" / "soliton.json", "soliton");
  const std::string hash = config_hash(cfg);
  const RadialSolitonProfile prof = solve_profile(cfg);
  const double a_star = soliton_mass(prof);
  const GridSpec bg = cfg.blowup_grid();
  const double A = constant_A(prof);

  LinearizedSolver solver(prof, bg);
  note(ctx, "solving the first correction");
  const ConstrainedSolution s1 = solver.compute_psi(1, A, cfg.omega, nullptr);
  note(ctx, "solving the second correction");
  const ConstrainedSolution s2 = solver.compute_psi(2, A, cfg.omega, nullptr);
  note(ctx, "solving the third correction");
  const ConstrainedSolution s3 = solver.compute_psi(3, A, cfg.omega, &s1.psi);

  const ExpansionConstants c = make_constants(prof, s1.psi, cfg.a1 * a_star, cfg.a2 * a_star, cfg.omega);
  const QuadratureCrossCheck qc = cross_check_quadrature(prof, bg, cfg.omega);

  const fs::path dir = ctx.outdir / "expand";
  fs::create_directories(dir);
  write_field(dir / "psi1.field", s1.psi, "psi1", "dimensionless", hash);
  write_field(dir / "psi2.field", s2.psi, "psi2", "dimensionless", hash);
  write_field(dir / "psi3.field", s3.psi, "psi3", "dimensionless", hash);
  write_constants_json(dir / "constants.json", c, hash);

  json j;
  j["config_hash"] = hash;
  j["blowup_grid"] = grid_json(bg);
  json solves = json::array();
  for (const auto* s : {&s1, &s2, &s3})
    solves.push_back(json{{"residual", s->residual},
                          {"kernel_projection", s->kernel_projection},
                          {"gauge_pin", s->gauge_pin},
                          {"gradient_pin", s->gradient_pin},
                          {"iterations", s->iterations}});
  j["solves"] = solves;
  j["quadrature_gap"] = qc.max_relative_gap();
  j["eps_ratio_slope"] = -c.B2 / (4.0 * c.B1);
  write_json(dir / "expand.json", j);

  say(ctx, "A = " + num(c.A) + "  B1 = " + num(c.B1) + "  B2 = " + num(c.B2) + "  B3 = " + num(c.B3) +
               "  B4 = " + num(c.B4) + "  beta* = " + num(c.beta_star));
  return 0;
}

int cmd_sweep(const PipelineContext& ctx) {
  const RunConfig& cfg = ctx.config;
  require_stage(ctx.outdir / "expand" / "constants.json", "expand");
  kernels::set_threads(cfg.workers);
  const std::string hash = config_hash(cfg);
  const ExpansionConstants c = read_constants_json(ctx.outdir / "expand" / "constants.json");
  const RadialSolitonProfile prof = solve_profile(cfg);
  const GridSpec lab = cfg.lab_grid();
  const fs::path root = ctx.outdir / "sweep";
  fs::create_directories(root);

  MinimizerOptions opt;
  opt.tol = cfg.solver_tol;
  opt.max_iter = cfg.solver_max_iter;
  opt.throw_on_failure = false;

  json summary;
  summary["config_hash"] = hash;
  summary["runs"] = json::array();
  int failures = 0;
  std::optional<TwoComponentState> warm;

  for (const double frac : cfg.beta_frac_list) {
    const std::string name = sweep_dir_name(frac);
    const fs::path dir = root / name;
    json entry{{"beta_frac", frac}, {"dir", name}};
    try {
      const CouplingParams p = params_for(cfg, c, frac);
      const double alpha = alpha_beta(p, c);
      if (lab.h() > alpha / kResolutionRatio)
        throw Error(ErrorCode::ResolutionViolation, "grid spacing " + num(lab.h()) + " exceeds alpha/6 = " +
                                                        num(alpha / kResolutionRatio) + " at beta/beta* = " +
                                                        num(frac));
      if (cfg.init_mode == InitMode::Resume && fs::exists(dir / "run.json")) {
        const json rec = read_json(dir / "run.json");
        if (rec.value("run_hash", "") == run_hash(cfg) && rec.value("beta_frac", -1.0) == frac &&
            rec.value("converged", false)) {
          warm = TwoComponentState{read_field(dir / "u1.field"), read_field(dir / "u2.field")};
          entry["status"] = "converged";
          entry["resumed"] = true;
          summary["runs"].push_back(entry);
          say(ctx, "beta/beta* = " + num(frac) + "  resumed");
          continue;
        }
      }
      TwoComponentState init = warm ? *warm
                               : cfg.init_mode == InitMode::Gaussian
                                   ? gaussian_initial_state(lab, {0.0, 1.0}, std::max(alpha, 2.0 * lab.h()), c.gamma1)
                                   : predicted_initial_state(p, c, prof, lab);
      const GroundState gs = minimize(p, c.a_star, std::move(init), opt);
      fs::create_directories(dir);
      write_field(dir / "u1.field", gs.state.u1, "u1", "dimensionless", hash);
      write_field(dir / "u2.field", gs.state.u2, "u2", "dimensionless", hash);
      write_json(dir / "run.json", run_record(cfg, hash, frac, p, alpha, gs));
      if (!gs.converged) throw Error(ErrorCode::MaxIterations, "minimizer did not converge");
      warm = gs.state;
      entry["status"] = "converged";
      say(ctx, "beta/beta* = " + num(frac) + "  mu = " + num(gs.mu) + "  epsilon = " + num(gs.epsilon()) +
                   "  alpha = " + num(alpha) + "  iterations = " + std::to_string(gs.iterations));
    } catch (const Error& e) {
      ++failures;
      entry["status"] = e.code() == ErrorCode::ResolutionViolation ? "refused" : "failed";
      entry["error"] = std::string(error_code_name(e.code()));
      entry["message"] = e.what();
      say(ctx, "beta/beta* = " + num(frac) + "  " + entry["status"].get<std::string>() + ": " + e.what());
    }
    summary["runs"].push_back(entry);
  }
  summary["failures"] = failures;
  write_json(root / "summary.json", summary);
  return failures == 0 ? 0 : 1;
}

int cmd_report(const PipelineContext& ctx) {
  const RunConfig& cfg = ctx.config;
  require_stage(ctx.outdir / "sweep" / "summary.json", "sweep");
  kernels::set_threads(cfg.workers);
  const std::string hash = config_hash(cfg);
  const ExpansionConstants c = read_constants_json(ctx.outdir / "expand" / "constants.json");
  const ComplexField2D psi1 = read_field(ctx.outdir / "expand" / "psi1.field");
  const RadialSolitonProfile prof = solve_profile(cfg);
  const GridSpec bg = psi1.grid;
  const ComplexField2D q = rasterize_q(prof, bg);
  const std::vector<SweepRun> runs = converged_runs(ctx.outdir / "sweep");

  json rows = json::array();
  std::vector<RatePoint> rate_points;
  std::ostringstream csv;
  csv << "beta,beta_frac,alpha,epsilon,epsilon_pred,p_beta,p_pred,E0,E2,E4,pohozaev,force_balance,symmetry_defect,"
         "winding\n";
  int flagged = 0;
  for (const SweepRun& r : runs) {
    const TwoComponentState s{read_field(r.dir / "u1.field"), read_field(r.dir / "u2.field")};
    const CouplingParams p = params_for(cfg, c, r.frac);
    const double mu = r.record.at("mu");
    const double alpha = alpha_beta(p, c);
    const BlowupFrame fe = to_blowup_frame(s, mu, p, prof, bg);
    const BlowupFrame fa = to_blowup_frame(s, mu, p, prof, bg, alpha, fe.x_beta);
    std::array<ComplexField2D, 2> o0, o2, o4;
    for (int j = 1; j <= 2; ++j) {
      o0[j - 1] = predicted_blowup_profile(j, p, c, prof, &psi1, bg, 0);
      o2[j - 1] = predicted_blowup_profile(j, p, c, prof, &psi1, bg, 2);
      o4[j - 1] = predicted_blowup_profile(j, p, c, prof, &psi1, bg, 4);
    }
    ExpansionErrors err = expansion_errors(fa, o0, o2, o4);
    const auto [r1, r2] = rho_jbeta(p, c.a_star);
    err.lemma = lemma_error(fe, {r1, r2}, q, psi1);
    const double poh = pohozaev_residual(fe, p, c.a_star);
    const ForceBalance fb = force_balance_residual(s);
    const SymmetryDefect sd = symmetry_defect(s);
    const int wind = winding_diagnostic(s, 0.5 * fe.epsilon, fe.x_beta);
    const double eps_pred = predicted_epsilon(alpha, c);
    const double p_pred = 1.0 + predicted_peak_offset(fe.epsilon, c.A);
    const GridSpec lab{r.record.at("grid").at("n").get<std::size_t>(), r.record.at("grid").at("extent").get<double>()};
    const bool resolved = lab.h() <= alpha / kResolutionRatio;
    rate_points.push_back({alpha, fe.epsilon, fe.p_beta, resolved});
    const bool ordered = err.e0 > err.e2 && err.e2 > err.e4;
    const bool sym_flag = sd.conjugate_reflection > kSymmetryFlag;
    if (sym_flag || wind != 0) ++flagged;

    json row;
    row["beta"] = p.beta;
    row["beta_frac"] = r.frac;
    row["alpha"] = alpha;
    row["epsilon"] = fe.epsilon;
    row["epsilon_pred"] = eps_pred;
    row["p_beta"] = fe.p_beta;
    row["p_pred"] = p_pred;
    row["E0"] = err.e0;
    row["E2"] = err.e2;
    row["E4"] = err.e4;
    row["E4_over_alpha4"] = err.e4 / std::pow(alpha, 4);
    row["lemma_error"] = err.lemma;
    row["pohozaev"] = poh;
    row["force_balance"] = json{{"along_x2", fb.along_x2}, {"along_x1", fb.along_x1}};
    row["symmetry_defect"] = json{{"conjugate_reflection", sd.conjugate_reflection},
                                  {"plain_reflection", sd.plain_reflection}};
    row["winding"] = wind;
    row["theta"] = json::array({fe.theta1, fe.theta2});
    row["theta_alpha_frame"] = json::array({fa.theta1, fa.theta2});
    row["resolved"] = resolved;
    row["ordered"] = ordered;
    row["symmetry_flag"] = sym_flag;
    rows.push_back(row);

    csv << num(p.beta) << ',' << num(r.frac) << ',' << num(alpha) << ',' << num(fe.epsilon) << ','
        << num(eps_pred) << ',' << num(fe.p_beta) << ',' << num(p_pred) << ',' << num(err.e0) << ','
        << num(err.e2) << ',' << num(err.e4) << ',' << num(poh) << ',' << num(fb.along_x2) << ','
        << num(sd.conjugate_reflection) << ',' << wind << "\n";
  }

  json report;
  report["config_hash"] = hash;
  report["constants"] = json{{"a_star", c.a_star}, {"A", c.A}, {"B1", c.B1}, {"B2", c.B2}, {"B3", c.B3},
                             {"B4", c.B4}, {"beta_star", c.beta_star}};
  report["rows"] = rows;

  std::ostringstream table;
  table << "beta/beta*  alpha        epsilon      p_beta       E0           E2           E4           pohozaev\n";
  for (const auto& row : rows)
    table << std::left << std::setw(12) << num(row["beta_frac"].get<double>()) << std::scientific
          << std::setprecision(5) << std::setw(13) << row["alpha"].get<double>() << std::setw(13)
          << row["epsilon"].get<double>() << std::setw(13) << row["p_beta"].get<double>() << std::setw(13)
          << row["E0"].get<double>() << std::setw(13) << row["E2"].get<double>() << std::setw(13)
          << row["E4"].get<double>() << row["pohozaev"].get<double>() << std::defaultfloat
          << (row["symmetry_flag"].get<bool>() ? "  SYMMETRY" : "") << "\n";

  try {
    const RateFit f = rate_checks(rate_points);
    auto fit_json = [](const PolyFit& pf) {
      return json{{"coeffs", pf.coeffs}, {"half_widths", pf.half_widths}, {"degree", pf.degree},
                  {"points", pf.points}, {"residual_rms", pf.residual_rms}, {"confidence", pf.confidence}};
    };
    report["rate_fit"] = json{{"eps_ratio", fit_json(f.eps_ratio)},
                              {"peak_shift", fit_json(f.peak_shift)},
                              {"used", f.used},
                              {"excluded", f.excluded}};
    table << "\nfit                             measured       +/-          expected\n";
    auto line = [&](const std::string& what, double v, double hw, double expect) {
      table << std::left << std::setw(32) << what << std::scientific << std::setprecision(6) << std::setw(15) << v
            << std::setw(13) << hw << expect << std::defaultfloat << "\n";
    };
    line("eps/alpha intercept", f.eps_ratio.intercept(), f.eps_ratio.half_widths[0], 1.0);
    line("eps/alpha alpha^2 coefficient", f.eps_ratio.slope(), f.eps_ratio.half_widths[1], -c.B2 / (4.0 * c.B1));
    line("(p-1)/eps^2 intercept", f.peak_shift.intercept(), f.peak_shift.half_widths[0], c.A);
    line("(p-1)/eps^2 slope", f.peak_shift.slope(), f.peak_shift.half_widths[1], -0.5 * c.A * c.A);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientPoints) throw;
    report["rate_fit"] = json{{"error", std::string(error_code_name(e.code()))}, {"message", e.what()}};
    table << "\nrate fits skipped: " << e.what() << "\n";
  }
  report["flagged_runs"] = flagged;

  const fs::path dir = ctx.outdir / "report";
  fs::create_directories(dir);
  if (cfg.wants_format("json")) write_json(dir / "report.json", report);
  if (cfg.wants_format("csv")) write_text(dir / "report.csv", csv.str());
  write_text(dir / "summary.txt", table.str());
  say(ctx, table.str());
  return flagged == 0 ? 0 : 1;
}

int cmd_all(const PipelineContext& ctx) {
  int code = cmd_soliton(ctx);
  code = std::max(code, cmd_expand(ctx));
  code = std::max(code, cmd_sweep(ctx));
  code = std::max(code, cmd_report(ctx));
  return code;
}

}  // namespace ringbec
