#include "ringbec/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ringbec/error.hpp"

namespace ringbec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    fail("key '" + key + "': '" + v + "' is not a finite number");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) fail("key '" + key + "': '" + v + "' is not a non-negative integer");
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::string body = v;
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') fail("unterminated list '" + v + "'");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail("empty list item in '" + v + "'");
    out.push_back(item);
  }
  if (out.empty()) fail("empty list");
  return out;
}

std::string fmt(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> m = {
      {"a1", [](RunConfig& c, auto& k, auto& v) { c.a1 = to_double(k, v); }},
      {"a2", [](RunConfig& c, auto& k, auto& v) { c.a2 = to_double(k, v); }},
      {"omega", [](RunConfig& c, auto& k, auto& v) { c.omega = to_double(k, v); }},
      {"beta_frac_list",
       [](RunConfig& c, auto& k, auto& v) {
         c.beta_frac_list.clear();
         for (const auto& s : split_list(v)) c.beta_frac_list.push_back(to_double(k, s));
       }},
      {"grid.n", [](RunConfig& c, auto& k, auto& v) { c.grid_n = to_uint(k, v); }},
      {"grid.extent", [](RunConfig& c, auto& k, auto& v) { c.grid_extent = to_double(k, v); }},
      {"solver.tol", [](RunConfig& c, auto& k, auto& v) { c.solver_tol = to_double(k, v); }},
      {"solver.max_iter", [](RunConfig& c, auto& k, auto& v) { c.solver_max_iter = static_cast<int>(to_uint(k, v)); }},
      {"solver.seed", [](RunConfig& c, auto& k, auto& v) { c.solver_seed = to_uint(k, v); }},
      {"init.mode",
       [](RunConfig& c, auto&, auto& v) {
         if (v == "predicted") c.init_mode = InitMode::Predicted;
         else if (v == "gaussian") c.init_mode = InitMode::Gaussian;
         else if (v == "resume") c.init_mode = InitMode::Resume;
         else fail("init.mode must be predicted, gaussian or resume, got '" + v + "'");
       }},
      {"io.outdir", [](RunConfig& c, auto&, auto& v) { c.io_outdir = v; }},
      {"blowup.n", [](RunConfig& c, auto& k, auto& v) { c.blowup_n = to_uint(k, v); }},
      {"blowup.extent", [](RunConfig& c, auto& k, auto& v) { c.blowup_extent = to_double(k, v); }},
      {"report.formats", [](RunConfig& c, auto&, auto& v) { c.report_formats = split_list(v); }},
      {"soliton.r_max", [](RunConfig& c, auto& k, auto& v) { c.soliton_r_max = to_double(k, v); }},
      {"workers", [](RunConfig& c, auto& k, auto& v) { c.workers = static_cast<int>(to_uint(k, v)); }},
  };
  return m;
}

bool power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

void validate(const RunConfig& c) {
  if (!(c.a1 > 0.0 && c.a1 < 1.0) || !(c.a2 > 0.0 && c.a2 < 1.0))
    fail("a1 and a2 are fractions of a* and must lie in (0, 1)");
  if (!(c.omega >= 0.0)) fail("omega must be non-negative");
  for (std::size_t k = 0; k < c.beta_frac_list.size(); ++k) {
    const double f = c.beta_frac_list[k];
    if (!(f > 0.0 && f < 1.0)) fail("beta_frac_list entries must lie in (0, 1)");
    if (k > 0 && !(f > c.beta_frac_list[k - 1])) fail("beta_frac_list must be strictly increasing");
  }
  if (!power_of_two(c.grid_n) || !power_of_two(c.blowup_n)) fail("grid.n and blowup.n must be powers of two >= 8");
  if (!(c.grid_extent > 1.0)) fail("grid.extent must exceed 1 so the ring fits in the box");
  if (!(c.blowup_extent > 0.0)) fail("blowup.extent must be positive");
  if (!(c.solver_tol > 0.0)) fail("solver.tol must be positive");
  if (c.solver_max_iter < 1) fail("solver.max_iter must be positive");
  if (c.io_outdir.empty()) fail("io.outdir must not be empty");
  for (const auto& f : c.report_formats)
    if (f != "json" && f != "csv") fail("report.formats entries must be json or csv, got '" + f + "'");
  if (!(c.soliton_r_max >= 10.0)) fail("soliton.r_max must be at least 10");
  if (c.workers < 1) fail("workers must be at least 1");
}

}  // namespace

bool RunConfig::wants_format(const std::string& f) const {
  return std::find(report_formats.begin(), report_formats.end(), f) != report_formats.end();
}

std::string init_mode_name(InitMode m) {
  switch (m) {
    case InitMode::Predicted: return "predicted";
    case InitMode::Gaussian: return "gaussian";
    case InitMode::Resume: return "resume";
  }
  return "predicted";
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) fail("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) fail("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    if (value.empty()) fail("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(c, key, value);
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream o;
  o << "a1 = " << fmt(c.a1) << "\n";
  o << "a2 = " << fmt(c.a2) << "\n";
  o << "omega = " << fmt(c.omega) << "\n";
  o << "beta_frac_list = ";
  for (std::size_t k = 0; k < c.beta_frac_list.size(); ++k) o << (k ? ", " : "") << fmt(c.beta_frac_list[k]);
  o << "\n";
  o << "grid.n = " << c.grid_n << "\n";
  o << "grid.extent = " << fmt(c.grid_extent) << "\n";
  o << "solver.tol = " << fmt(c.solver_tol) << "\n";
  o << "solver.max_iter = " << c.solver_max_iter << "\n";
  o << "solver.seed = " << c.solver_seed << "\n";
  o << "init.mode = " << init_mode_name(c.init_mode) << "\n";
  o << "io.outdir = " << c.io_outdir << "\n";
  o << "blowup.n = " << c.blowup_n << "\n";
  o << "blowup.extent = " << fmt(c.blowup_extent) << "\n";
  o << "report.formats = ";
  for (std::size_t k = 0; k < c.report_formats.size(); ++k) o << (k ? ", " : "") << c.report_formats[k];
  o << "\n";
  o << "soliton.r_max = " << fmt(c.soliton_r_max) << "\n";
  o << "workers = " << c.workers << "\n";
  return o.str();
}

namespace {

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string config_hash(const RunConfig& c) {
  // placement and thread count do not change any result
  RunConfig k = c;
  k.io_outdir = RunConfig{}.io_outdir;
  k.workers = RunConfig{}.workers;
  return fnv1a(canonical_text(k));
}

std::string run_hash(const RunConfig& c) {
  RunConfig k = c;
  k.io_outdir = RunConfig{}.io_outdir;
  k.workers = RunConfig{}.workers;
  k.init_mode = RunConfig{}.init_mode;
  k.beta_frac_list = RunConfig{}.beta_frac_list;
  k.report_formats = RunConfig{}.report_formats;
  return fnv1a(canonical_text(k));
}

}  // namespace ringbec
