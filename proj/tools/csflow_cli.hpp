#pragma once

// csflow command line: flow | cs-derivative | warped-verify | verify-all.
// Exit status: 0 success, 1 verification failure, 2 usage or validation error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csflow/berger.hpp"
#include "csflow/ricci_flow.hpp"
#include "csflow/verify.hpp"
#include "csflow/warped.hpp"

namespace csflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kFlowHeader =
    "t,lambda1,lambda2,lambda3,R11,R22,R33,cs_density,cs_integral";

using json = nlohmann::ordered_json;

/// Raised for bad flag values; mapped to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline berger::BergerParams parse_lambda(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--lambda: '" + item + "' is not a number");
    }
  }
  if (v.size() != 3) throw UsageError("--lambda needs three comma-separated values");
  try {
    berger::BergerParams p(v[0], v[1], v[2]);
    berger::check_parameter_window(p);
    return p;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--lambda: ") + e.what());
  }
}

/// Shorthand warps: "2+sin", "1+2sin", "2+0.5cos", "2-0.9sin(t1)*sin(t2)",
/// "3+cos(2t1)", or a bare constant "2". A bare sin/cos acts on t1.
inline warped::WarpFunction parse_warp(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  }
  static const std::string number = R"((\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+))";
  static const std::string factor = R"((?:sin|cos)(?:\(\d*t\d\))?)";
  static const std::regex whole("^" + number + "(?:([+-])" + number + "?\\*?(" + factor +
                                "(?:\\*" + factor + ")*))?$");
  std::smatch m;
  if (!std::regex_match(text, m, whole)) {
    throw UsageError("--warp: cannot parse '" + raw + "' (expected e.g. 2+0.5cos or 2+sin(t1)*cos(t2))");
  }
  const double a = std::stod(m[1]);
  if (!m[2].matched) {
    try {
      return warped::WarpFunction::constant(a);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--warp: ") + e.what());
    }
  }
  double b = m[3].matched ? std::stod(m[3]) : 1.0;
  if (m[2] == "-") b = -b;
  std::vector<warped::TrigFactor> factors;
  static const std::regex one(R"((sin|cos)(?:\((\d*)t(\d)\))?)");
  const std::string trig = m[4];
  for (auto it = std::sregex_iterator(trig.begin(), trig.end(), one); it != std::sregex_iterator();
       ++it) {
    warped::TrigFactor f;
    f.kind = (*it)[1] == "sin" ? warped::TrigFactor::Kind::sin : warped::TrigFactor::Kind::cos;
    f.frequency = (*it)[2].matched && (*it)[2].length() > 0 ? std::stoi((*it)[2]) : 1;
    f.coordinate = (*it)[3].matched ? std::stoi((*it)[3]) - 1 : 0;
    if (f.coordinate < 0 || f.coordinate > 2) {
      throw UsageError("--warp: coordinates are t1, t2, t3");
    }
    factors.push_back(f);
  }
  try {
    return warped::WarpFunction::trig(a, b, std::move(factors));
  } catch (const std::invalid_argument& e) {
    throw UsageError("--warp '" + raw + "' is not a positive warping function: " + e.what());
  }
}

/// Anchors printed with --paper-anchors.
inline json anchors_for(const std::string& command) {
  if (command == "flow") {
    return {{"lambda", "Ricci flow ODE for left-invariant metrics on SU(2)"},
            {"R11,R22,R33", "Ricci curvature of generalized Berger spheres"},
            {"cs_density", "Chern-Simons form TP1 against the initial coframe"},
            {"cs_integral", "Chern-Simons form integrated over S^3"}};
  }
  if (command == "cs-derivative") {
    return {{"tp1_dot_coefficient", "derivative of TP1 in three constants"},
            {"pipeline_value", "first variation 2 P1(wdot ^ Omega)"},
            {"F", "F(alpha, beta) positivity"},
            {"invariant", "invariant only when lambda1 = lambda2 = lambda3"}};
  }
  if (command == "warped-verify") {
    return {{"max_trace_product", "tr(wdot) tr(Omega) = 0 for warped products"},
            {"max_trace_wedge", "tr(wdot ^ Omega) = 0 for warped products"},
            {"sparsity", "shape of Omega and wdot on S^n x_f S^m"}};
  }
  return {{"checks", "one anchor per record"}};
}

struct OutputSpec {
  std::string path;  // empty: the `out` stream
  std::string format;
};

/// Writes `text` to the requested path or to `out`.
inline void emit(const OutputSpec& o, const std::string& text, std::ostream& out) {
  if (o.path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.path);
  if (!file) throw UsageError("cannot open output file " + o.path);
  file << text;
  if (!file) throw UsageError("failed writing output file " + o.path);
}

inline std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline json check_json(const verify::CheckRecord& r) {
  json j;
  j["name"] = r.name;
  j["status"] = r.passed ? "pass" : "fail";
  j["max_error"] = r.max_error;
  j["tolerance"] = r.tolerance;
  j["paper_anchor"] = r.paper_anchor;
  return j;
}

inline std::string checks_csv(const std::vector<verify::CheckRecord>& records) {
  std::ostringstream s;
  s << "name,status,max_error,tolerance,paper_anchor\n";
  for (const auto& r : records) {
    s << r.name << ',' << (r.passed ? "pass" : "fail") << ',' << format_number(r.max_error) << ','
      << format_number(r.tolerance) << ",\"" << r.paper_anchor << "\"\n";
  }
  return s.str();
}

inline std::string key_value_csv(const json& flat) {
  std::ostringstream s;
  s << "key,value\n";
  for (const auto& [k, v] : flat.items()) {
    if (v.is_structured()) continue;
    s << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return s.str();
}

inline void check_positive(double v, const std::string& flag) {
  if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(flag + " must be a positive number");
}

// ---- commands -------------------------------------------------------------

struct FlowConfig {
  std::string lambda = "1,1,1";
  double h = 1e-3;
  double t_end = 0.2;
  bool normalized = false;
};

inline int cmd_flow(const FlowConfig& cfg, const OutputSpec& o, bool anchors, std::ostream& out,
                    std::ostream& err) {
  const auto start = parse_lambda(cfg.lambda);
  check_positive(cfg.h, "--h");
  check_positive(cfg.t_end, "--t-end");
  if (cfg.h > cfg.t_end) throw UsageError("--h must not exceed --t-end");

  const auto traj = flow::integrate(start, cfg.t_end, cfg.h, cfg.normalized);
  const auto cs = flow::cs_along_flow(traj);
  std::string text;
  if (o.format == "json") {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "flow";
    j["normalized"] = cfg.normalized;
    j["step"] = cfg.h;
    j["t_end"] = cfg.t_end;
    j["extinct"] = traj.extinct;
    json rows = json::array();
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      const auto& s = traj.states[n];
      rows.push_back({{"t", s.t},
                      {"lambda", {s.params[0], s.params[1], s.params[2]}},
                      {"ricci", {s.ricci[0], s.ricci[1], s.ricci[2]}},
                      {"cs_density", cs[n].cs_density},
                      {"cs_integral", cs[n].cs_integral}});
    }
    j["rows"] = rows;
    if (anchors) j["paper_anchors"] = anchors_for("flow");
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream s;
    s << kFlowHeader << '\n';
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      const auto& st = traj.states[n];
      s << format_number(st.t);
      for (int i = 0; i < 3; ++i) s << ',' << format_number(st.params[i]);
      for (int i = 0; i < 3; ++i) s << ',' << format_number(st.ricci[i]);
      s << ',' << format_number(cs[n].cs_density) << ',' << format_number(cs[n].cs_integral)
        << '\n';
    }
    text = s.str();
    if (anchors) {
      for (const auto& [k, v] : anchors_for("flow").items()) {
        err << "anchor " << k << ": " << v.get<std::string>() << '\n';
      }
    }
  }
  emit(o, text, out);
  if (traj.extinct) {
    err << "warning: flow stopped at t = " << traj.states.back().t
        << " before t_end = " << cfg.t_end
        << " (a lambda reached the extinction threshold); output is partial\n";
  }
  return kExitOk;
}

struct CsDerivativeConfig {
  std::string lambda = "1,1,1";
  double zero_tol = 1e-12;
  double ratio_tol = 1e-12;
};

inline int cmd_cs_derivative(const CsDerivativeConfig& cfg, const OutputSpec& o, bool anchors,
                             std::ostream& out) {
  const auto p = parse_lambda(cfg.lambda);
  const double coef = berger::tp1_dot_coefficient(p);
  const double pipeline = berger::tp1_dot_pipeline(p);
  const auto [alpha, beta] = berger::normalized_pair(p);
  const bool invariant = std::abs(coef) < cfg.zero_tol;

  verify::CheckRecord agree{"pipeline_matches_closed_form", false, 0.0, cfg.ratio_tol,
                            "first variation of TP1 on generalized Berger spheres"};
  agree.max_error = std::abs(pipeline - berger::kPipelineToClosedForm * coef) /
                    std::max(1.0, std::abs(pipeline));
  agree.passed = agree.max_error <= agree.tolerance;

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "cs-derivative";
  j["lambda"] = {p[0], p[1], p[2]};
  j["tp1_dot_coefficient"] = coef;
  j["pipeline_value"] = pipeline;
  j["ratio"] = coef != 0.0 ? json(pipeline / coef) : json(nullptr);
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["F"] = berger::big_F(alpha, beta);
  j["invariant"] = invariant;
  j["checks"] = json::array({check_json(agree)});
  if (anchors) j["paper_anchors"] = anchors_for("cs-derivative");
  emit(o, o.format == "csv" ? key_value_csv(j) : j.dump(2) + "\n", out);
  return agree.passed ? kExitOk : kExitVerification;
}

struct WarpedConfig {
  int n = 1;
  std::string warp = "2+sin";
  int resolution = 16;
  double exact_tol = 1e-8;
  double sparsity_tol = 1e-11;
};

inline int cmd_warped_verify(const WarpedConfig& cfg, unsigned jobs, const OutputSpec& o,
                             bool anchors, std::ostream& out) {
  if (cfg.n != 1 && cfg.n != 2) throw UsageError("--n must be 1 or 2");
  if (cfg.resolution < 4) throw UsageError("--resolution must be at least 4");
  const warped::WarpedSpec spec(cfg.n, parse_warp(cfg.warp));
  try {
    // Probe one interior point so that bad warps surface as usage errors.
    (void)warped::metric(spec, {1.0, 1.0, 1.0});
  } catch (const std::exception& e) {
    throw UsageError("--warp '" + cfg.warp + "': " + e.what());
  }
  const auto r = warped::grid_scan(spec, cfg.resolution, jobs);
  const bool exact = r.max_trace_product < cfg.exact_tol && r.max_trace_wedge < cfg.exact_tol;

  const auto rec = [](std::string name, double err, double tol, std::string anchor) {
    return verify::CheckRecord{std::move(name), err <= tol, err, tol, std::move(anchor)};
  };
  std::vector<verify::CheckRecord> checks{
      rec("trace_product", r.max_trace_product, cfg.exact_tol,
          "tr(wdot) tr(Omega) = 0 for warped products"),
      rec("trace_wedge", r.max_trace_wedge, cfg.exact_tol,
          "tr(wdot ^ Omega) = 0 for warped products"),
      rec("curvature_sparsity", r.max_curvature_pattern_violation, cfg.sparsity_tol,
          "shape of Omega on S^n x_f S^m"),
      rec("omega_dot_sparsity", r.max_omega_dot_pattern_violation, cfg.sparsity_tol,
          "shape of wdot on S^n x_f S^m")};
  std::stable_partition(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; });

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "warped-verify";
  j["n"] = cfg.n;
  j["warp"] = spec.warp().name();
  j["resolution"] = cfg.resolution;
  j["points"] = r.points;
  j["max_trace_product"] = r.max_trace_product;
  j["max_trace_wedge"] = r.max_trace_wedge;
  j["sparsity_pass"] = r.max_curvature_pattern_violation <= cfg.sparsity_tol &&
                       r.max_omega_dot_pattern_violation <= cfg.sparsity_tol;
  j["exact"] = exact;
  json arr = json::array();
  for (const auto& c : checks) arr.push_back(check_json(c));
  j["checks"] = arr;
  if (anchors) j["paper_anchors"] = anchors_for("warped-verify");
  emit(o, o.format == "csv" ? checks_csv(checks) : j.dump(2) + "\n", out);
  return verify::all_passed(checks) ? kExitOk : kExitVerification;
}

struct VerifyAllConfig {
  std::uint64_t seed = verify::kDefaultSeed;
  int samples = 100;
  int resolution = 16;
  std::vector<std::string> tolerances;  // name=value
};

inline int cmd_verify_all(const VerifyAllConfig& cfg, unsigned jobs, const OutputSpec& o,
                          std::ostream& out) {
  verify::Options opts;
  opts.seed = cfg.seed;
  opts.jobs = jobs;
  if (cfg.samples < 1) throw UsageError("--samples must be at least 1");
  if (cfg.resolution < 4) throw UsageError("--resolution must be at least 4");
  opts.samples = cfg.samples;
  opts.grid_resolution = cfg.resolution;

  std::map<std::string, bool> known;
  for (const auto& d : verify::catalogue()) known[d.name] = true;
  for (const auto& t : cfg.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + t + "'");
    const std::string name = t.substr(0, eq);
    if (!known.count(name)) throw UsageError("--tol: unknown check '" + name + "'");
    double v = 0.0;
    try {
      v = std::stod(t.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--tol: bad value in '" + t + "'");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("--tol: tolerance must be >= 0");
    opts.tolerance_overrides[name] = v;
  }

  const auto records = verify::run_checks(opts);
  const bool ok = verify::all_passed(records);
  if (o.format == "csv") {
    emit(o, checks_csv(records), out);
  } else {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "verify-all";
    j["seed"] = cfg.seed;
    j["passed"] = ok;
    json arr = json::array();
    for (const auto& r : records) arr.push_back(check_json(r));
    j["checks"] = arr;
    emit(o, j.dump(2) + "\n", out);
  }
  return ok ? kExitOk : kExitVerification;
}

// ---- entry ----------------------------------------------------------------

/// Runs the CLI with `args` excluding the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chern-Simons invariants under Ricci flow", "csflow"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");

  OutputSpec output;
  bool anchors = false;
  unsigned jobs = 0;
  std::uint64_t seed = verify::kDefaultSeed;
  const auto common = [&](CLI::App* sub, const std::string& default_format) {
    output.format = default_format;
    sub->add_option("--output", output.path, "output file (default: standard output)");
    sub->add_option("--format", output.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--jobs", jobs, "worker threads (0 = all processors)");
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_flag("--paper-anchors", anchors, "report the source anchor of each quantity");
  };

  FlowConfig flow_cfg;
  auto* flow = app.add_subcommand("flow", "integrate the Ricci flow of a Berger metric");
  flow->set_help_flag("--help", "print this help and exit");
  flow->add_option("--lambda", flow_cfg.lambda, "l1,l2,l3")->capture_default_str();
  flow->add_option("--h", flow_cfg.h, "RK4 step")->capture_default_str();
  flow->add_option("--t-end", flow_cfg.t_end, "final time")->capture_default_str();
  flow->add_flag("--normalized", flow_cfg.normalized, "volume-normalized flow");

  CsDerivativeConfig cs_cfg;
  auto* cs = app.add_subcommand("cs-derivative", "time derivative of TP1 at t = 0");
  cs->add_option("--lambda", cs_cfg.lambda, "l1,l2,l3")->capture_default_str();
  cs->add_option("--zero-tol", cs_cfg.zero_tol, "invariance threshold")->capture_default_str();
  cs->add_option("--ratio-tol", cs_cfg.ratio_tol, "pipeline agreement tolerance")
      ->capture_default_str();

  WarpedConfig w_cfg;
  auto* wv = app.add_subcommand("warped-verify", "exactness scan on a warped product");
  wv->add_option("--n", w_cfg.n, "base sphere dimension (1 or 2)")->capture_default_str();
  wv->add_option("--warp", w_cfg.warp, "warping function, e.g. 2+0.5cos")->capture_default_str();
  wv->add_option("--resolution", w_cfg.resolution, "grid points per axis")->capture_default_str();
  wv->add_option("--exact-tol", w_cfg.exact_tol, "residual tolerance")->capture_default_str();
  wv->add_option("--sparsity-tol", w_cfg.sparsity_tol, "pattern tolerance")->capture_default_str();

  VerifyAllConfig v_cfg;
  auto* va = app.add_subcommand("verify-all", "run every oracle cross-check");
  va->add_option("--samples", v_cfg.samples, "random parameter samples")->capture_default_str();
  va->add_option("--resolution", v_cfg.resolution, "grid points per axis")->capture_default_str();
  va->add_option("--tol", v_cfg.tolerances, "override a tolerance: name=value");

  // Every subcommand binds the shared flags; only the parsed one writes them.
  common(flow, "csv");
  const std::string flow_default = output.format;
  for (auto* sub : {cs, wv, va}) common(sub, "json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (flow->parsed()) {
      if (flow->count("--format") == 0) output.format = flow_default;
      return cmd_flow(flow_cfg, output, anchors, out, err);
    }
    if (cs->parsed()) return cmd_cs_derivative(cs_cfg, output, anchors, out);
    if (wv->parsed()) return cmd_warped_verify(w_cfg, jobs, output, anchors, out);
    VerifyAllConfig cfg = v_cfg;
    cfg.seed = seed;
    return cmd_verify_all(cfg, jobs, output, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace csflow::cli
