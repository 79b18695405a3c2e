// csgeo: batch front door for the contact-geometry analysis library.
//
// Subcommands:
//   analyze      analyze a surface spec file or built-in fixture
//   reconstruct  rebuild a constant-invariant minimal surface and verify it
//   family       sample the invariant circle at a fixed contact angle
//   verify       run the consolidated fixture + round-trip check suite
//
// Exit codes: 0 success, 1 tolerance/model failure, 2 bad input.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "csgeo/analysis.hpp"
#include "csgeo/errors.hpp"
#include "csgeo/exprlang.hpp"
#include "csgeo/fixtures.hpp"
#include "csgeo/frames.hpp"
#include "csgeo/io.hpp"
#include "csgeo/reconstruct.hpp"
#include "csgeo/surface.hpp"
#include "csgeo/tolerances.hpp"

namespace fs = std::filesystem;

using csgeo::format_double;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

bool is_set(double x) { return !std::isnan(x); }

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string grid_text;
  double beta = kUnset;
  double alpha = kUnset;
  double a = kUnset;
  double b = kUnset;
  std::string out_dir = ".";
  std::string format;  // empty = subcommand default
  bool strict = false;
  double h = kUnset;
  int samples = 36;
  std::string fixtures_filter;
  double tol = kUnset;
  std::string config_path;
};

// ---------------------------------------------------------------------------
// Config plumbing

std::pair<int, int> parse_grid_text(const std::string& text) {
  const auto x = text.find_first_of("xX");
  int nu = 0, nv = 0;
  try {
    if (x == std::string::npos || x == 0 || x + 1 >= text.size()) {
      throw std::invalid_argument("missing 'x'");
    }
    std::size_t posu = 0, posv = 0;
    nu = std::stoi(text.substr(0, x), &posu);
    nv = std::stoi(text.substr(x + 1), &posv);
    if (posu != x || posv != text.size() - x - 1) {
      throw std::invalid_argument("trailing characters");
    }
  } catch (const std::exception&) {
    throw csgeo::ConfigError("grid: expected N x M (e.g. 64x64), got '" +
                             text + "'");
  }
  if (nu < 5 || nv < 5) {
    throw csgeo::ConfigError("grid: at least 5x5 required, got '" + text +
                             "'");
  }
  return {nu, nv};
}

double config_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) {
    throw csgeo::ConfigError("config: key '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::string config_string(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) {
    throw csgeo::ConfigError("config: key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

// The config file overrides whatever the flags said.
void apply_config_overlay(RunConfig& cfg) {
  if (cfg.config_path.empty()) return;
  const std::string text = csgeo::read_text_file(cfg.config_path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw csgeo::ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw csgeo::ConfigError("config: top level must be a JSON object");
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const nlohmann::json& v = it.value();
    if (key == "input") {
      cfg.input = config_string(v, key);
    } else if (key == "grid") {
      cfg.grid_text = config_string(v, key);
    } else if (key == "beta") {
      cfg.beta = config_number(v, key);
    } else if (key == "alpha") {
      cfg.alpha = config_number(v, key);
    } else if (key == "a") {
      cfg.a = config_number(v, key);
    } else if (key == "b") {
      cfg.b = config_number(v, key);
    } else if (key == "out") {
      cfg.out_dir = config_string(v, key);
    } else if (key == "format") {
      cfg.format = config_string(v, key);
    } else if (key == "strict") {
      if (!v.is_boolean()) {
        throw csgeo::ConfigError("config: key 'strict' must be a boolean");
      }
      cfg.strict = v.get<bool>();
    } else if (key == "h") {
      cfg.h = config_number(v, key);
    } else if (key == "n") {
      if (!v.is_number_integer()) {
        throw csgeo::ConfigError("config: key 'n' must be an integer");
      }
      cfg.samples = v.get<int>();
    } else if (key == "fixtures") {
      cfg.fixtures_filter = config_string(v, key);
    } else if (key == "tol") {
      cfg.tol = config_number(v, key);
    } else {
      throw csgeo::ConfigError("config: unknown key '" + key + "'");
    }
  }
}

void validate_config(RunConfig& cfg) {
  if (!cfg.format.empty() && cfg.format != "json" && cfg.format != "csv") {
    throw csgeo::ConfigError("format: expected 'json' or 'csv', got '" +
                             cfg.format + "'");
  }
  if (is_set(cfg.h) && !(cfg.h > 0.0)) {
    throw csgeo::ConfigError("h: differencing step must be positive");
  }
  if (is_set(cfg.tol) && !(cfg.tol > 0.0)) {
    throw csgeo::ConfigError("tol: tolerance must be positive");
  }
  if (!cfg.grid_text.empty()) parse_grid_text(cfg.grid_text);  // early check
}

csgeo::AnalysisOptions analysis_options(const RunConfig& cfg) {
  csgeo::AnalysisOptions opt;
  if (is_set(cfg.h)) opt.connection.h = cfg.h;
  return opt;
}

void write_file(const fs::path& dir, const std::string& name,
                const std::string& content, std::vector<std::string>& written) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path p = dir / name;
  csgeo::write_text_file(p.string(), content);
  written.push_back(p.string());
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Identity gate thresholds shared by strict analysis, reconstruction, and the
// verify suite.

const std::vector<std::pair<std::string, double>>& identity_gates() {
  static const std::vector<std::pair<std::string, double>> gates = {
      {"K_gauss_vs_intrinsic", 1e-4}, {"K_conex_vs_intrinsic", 1e-4},
      {"lapla_beta", 1e-5},           {"codazzi1", 1e-5},
      {"codazzi2", 1e-5},             {"codazzi3", 1e-5},
      {"codazzi4", 1e-5},             {"theorem1", 1e-5},
      {"a_closure", 1e-6},
  };
  return gates;
}

// Applicable, non-diagnostic identities whose residual exceeds the gate.
std::vector<std::string> failing_identities(const csgeo::IdentityReport& rep,
                                            double a_closure_gate) {
  std::vector<std::string> bad;
  for (const auto& [name, thr] : identity_gates()) {
    const double gate = name == "a_closure" ? a_closure_gate : thr;
    const csgeo::IdentityStat* s = rep.find(name);
    if (!s || !s->applicable || s->diagnostic) continue;
    if (!(s->max_abs <= gate)) {
      bad.push_back(name + " = " + format_double(s->max_abs) +
                    " (gate " + format_double(gate) + ")");
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// analyze

struct ResolvedSurface {
  std::string name;
  csgeo::expr::SurfaceAst ast;
  csgeo::GridSpec grid;
};

ResolvedSurface resolve_surface(const RunConfig& cfg) {
  ResolvedSurface rs;
  if (fs::exists(cfg.input) && fs::is_regular_file(cfg.input)) {
    rs.name = fs::path(cfg.input).filename().string();
    rs.ast = csgeo::expr::load_surface_spec(csgeo::read_text_file(cfg.input));
    rs.grid.nu = 48;
    rs.grid.nv = 48;
    rs.grid.u0 = 0.0;
    rs.grid.v0 = 0.0;
    rs.grid.extent_u = 2.0 * M_PI;
    rs.grid.extent_v = 2.0 * M_PI;
    rs.grid.periodic_u = true;
    rs.grid.periodic_v = true;
  } else {
    std::string name = fs::path(cfg.input).filename().string();
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
      name = name.substr(0, name.size() - 5);
    }
    const csgeo::Fixture& f = csgeo::fixture_by_name(name);
    rs.name = f.name;
    rs.ast = f.ast;
    rs.grid = f.grid;
  }
  if (!cfg.grid_text.empty()) {
    const auto [nu, nv] = parse_grid_text(cfg.grid_text);
    rs.grid.nu = nu;
    rs.grid.nv = nv;
  }
  return rs;
}

std::string points_json(const csgeo::AnalysisResult& r) {
  nlohmann::ordered_json root;
  root["columns"] = {"u",      "v",     "guard",  "beta",  "alpha",
                     "a",      "b",     "h_norm", "frame_residual",
                     "k_intrinsic",     "alpha1", "alpha2",
                     "beta1",  "beta2"};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < r.grid.nu; ++i) {
    for (int j = 0; j < r.grid.nv; ++j) {
      const std::size_t s = static_cast<std::size_t>(r.grid.index(i, j));
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      row.push_back(r.grid.u(i));
      row.push_back(r.grid.v(j));
      row.push_back(r.point_guard[s]);
      for (const csgeo::ScalarField* f :
           {&r.beta, &r.alpha, &r.a, &r.b, &r.h_norm, &r.frame_residual,
            &r.k_intrinsic, &r.alpha1, &r.alpha2, &r.beta1, &r.beta2}) {
        const double x = f->values[s];
        if (std::isfinite(x)) {
          row.push_back(x);
        } else {
          row.push_back(nullptr);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  root["points"] = std::move(rows);
  return root.dump(2) + "\n";
}

int cmd_analyze(const RunConfig& cfg) {
  const ResolvedSurface rs = resolve_surface(cfg);
  const csgeo::expr::ExpressionSurface surf(rs.ast);
  const csgeo::AnalysisResult res =
      csgeo::analyze_surface(surf, rs.grid, analysis_options(cfg));

  const std::string format = cfg.format.empty() ? "json" : cfg.format;
  std::vector<std::string> written;
  write_file(cfg.out_dir, "analysis.json", csgeo::analysis_report_json(res),
             written);
  if (format == "csv") {
    write_file(cfg.out_dir, "points.csv", csgeo::analysis_points_csv(res),
               written);
  } else {
    write_file(cfg.out_dir, "points.json", points_json(res), written);
  }

  std::cout << "surface: " << rs.name << " (" << rs.grid.nu << "x" << rs.grid.nv
            << " grid)\n";
  std::cout << "frame points: " << res.frame_points << "/" << rs.grid.size()
            << ", connection points: " << res.connection_points << "\n";
  if (!res.guard_counts.empty()) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : res.guard_counts) {
      parts.push_back(k + "=" + std::to_string(v));
    }
    std::cout << "guards: " << join(parts, ", ") << "\n";
  }
  std::cout << "max |H|: " << format_double(res.max_minimality)
            << ", legendrian: " << (res.all_legendrian ? "all" :
                                    res.any_legendrian ? "some" : "none")
            << "\n";
  int applicable = 0;
  std::vector<std::string> gated;
  for (const auto& s : res.identities.stats) {
    if (s.applicable) {
      ++applicable;
    } else if (!s.diagnostic) {
      gated.push_back(s.name + " [" + s.gate + "]");
    }
  }
  std::cout << "identities: " << applicable << " applicable";
  if (!gated.empty()) std::cout << "; gated: " << join(gated, ", ");
  std::cout << "\n";
  std::cout << "wrote: " << join(written, ", ") << "\n";

  if (cfg.strict) {
    const std::vector<std::string> bad = failing_identities(
        res.identities, 1e-6);
    if (!bad.empty()) {
      std::cout << "strict: " << bad.size() << " identity gate failure(s):\n";
      for (const auto& line : bad) std::cout << "  " << line << "\n";
      return 1;
    }
    std::cout << "strict: all applicable identity gates passed\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// reconstruct

csgeo::GridSpec reconstruction_grid(const RunConfig& cfg) {
  csgeo::GridSpec g;
  g.nu = 64;
  g.nv = 64;
  g.u0 = 0.0;
  g.v0 = 0.0;
  g.extent_u = 2.0 * M_PI;
  g.extent_v = 2.0 * M_PI;
  g.periodic_u = false;  // reconstructed immersions need not close up at 2*pi
  g.periodic_v = false;
  if (!cfg.grid_text.empty()) {
    const auto [nu, nv] = parse_grid_text(cfg.grid_text);
    g.nu = nu;
    g.nv = nv;
  }
  return g;
}

int cmd_reconstruct(const RunConfig& cfg) {
  if (!is_set(cfg.beta)) {
    throw csgeo::ConfigError("reconstruct: --beta is required");
  }
  if (is_set(cfg.alpha) != is_set(cfg.a)) {
    throw csgeo::ConfigError(
        "reconstruct: explicit constants need both --alpha and --a");
  }

  csgeo::InvariantConstants k;
  std::vector<std::string> written;
  if (is_set(cfg.alpha)) {
    csgeo::InvariantConstants guess;
    guess.beta = cfg.beta;
    guess.alpha = cfg.alpha;
    guess.a = cfg.a;
    guess.b = is_set(cfg.b) ? cfg.b : 0.0;
    const csgeo::ConstantBranch rb = csgeo::refine_constants(guess);
    const double shift = std::max(std::abs(rb.constants.alpha - guess.alpha),
                                  std::abs(rb.constants.a - guess.a));
    if (shift > 1e-4) {
      throw csgeo::IncompatibleConnection(
          "explicit constants are not near a compatible branch; nearest is "
          "alpha = " +
          format_double(rb.constants.alpha) + ", a = " +
          format_double(rb.constants.a));
    }
    k = rb.constants;
    std::cout << "constants: explicit beta=" << format_double(guess.beta)
              << " alpha=" << format_double(guess.alpha)
              << " a=" << format_double(guess.a)
              << " b=" << format_double(guess.b) << "\n";
    if (shift > 1e-12) {
      std::cout << "projected onto the compatible branch: alpha="
                << format_double(k.alpha) << " a=" << format_double(k.a)
                << " (shift " << format_double(shift) << ")\n";
    }
  } else {
    const std::vector<csgeo::ConstantBranch> branches =
        csgeo::solve_constant_invariants(cfg.beta);
    write_file(cfg.out_dir, "branches.json",
               csgeo::branches_to_json(cfg.beta, branches), written);
    k = branches.front().constants;
    std::cout << "constants: solved " << branches.size()
              << " branch(es); using beta=" << format_double(k.beta)
              << " alpha=" << format_double(k.alpha)
              << " a=" << format_double(k.a) << " b=" << format_double(k.b)
              << "\n";
  }

  const csgeo::GridSpec grid = reconstruction_grid(cfg);
  const csgeo::MaurerCartan mc = csgeo::assemble_maurer_cartan(k);
  const csgeo::Matrix6d f0 = csgeo::initial_adapted_frame(k);
  const csgeo::IntegrationResult integ =
      csgeo::integrate_frame(mc, f0, grid);

  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  if (format == "csv") {
    write_file(cfg.out_dir, "immersion.csv", csgeo::immersion_to_csv(integ),
               written);
  } else {
    write_file(cfg.out_dir, "immersion.json", csgeo::immersion_to_json(integ),
               written);
  }

  const csgeo::RoundtripReport rt =
      csgeo::roundtrip_verify(k, grid, analysis_options(cfg));
  write_file(cfg.out_dir, "roundtrip.json", csgeo::roundtrip_report_json(rt),
             written);

  std::cout << "integration: " << rt.method
            << ", sphere residual " << format_double(rt.max_sphere_residual)
            << ", path independence " << format_double(rt.path_independence)
            << "\n";
  std::cout << "recovered deviations: beta " << format_double(rt.beta_dev)
            << ", alpha " << format_double(rt.alpha_dev) << ", |a| "
            << format_double(rt.a_dev) << ", b " << format_double(rt.b_dev)
            << ", max |H| " << format_double(rt.max_minimality) << "\n";
  std::cout << "wrote: " << join(written, ", ") << "\n";

  std::vector<std::string> bad;
  const auto gate = [&bad](const char* name, double value, double thr) {
    if (!(value <= thr)) {
      bad.push_back(std::string(name) + " = " + format_double(value) +
                    " (gate " + format_double(thr) + ")");
    }
  };
  gate("beta_dev", rt.beta_dev, 1e-5);
  gate("alpha_dev", rt.alpha_dev, 1e-5);
  gate("a_dev", rt.a_dev, 1e-5);
  gate("b_dev", rt.b_dev, 1e-5);
  gate("max_minimality", rt.max_minimality, 1e-5);
  for (const std::string& line :
       failing_identities(rt.analysis.identities, 1e-5)) {
    bad.push_back(line);
  }
  for (const auto& [name, thr] : identity_gates()) {
    const csgeo::IdentityStat* s = rt.analysis.identities.find(name);
    if (s && !s->applicable && !s->diagnostic) {
      bad.push_back(name + " inapplicable [" + s->gate + "]");
    }
  }
  if (!bad.empty()) {
    std::cout << "round-trip gate failure(s):\n";
    for (const auto& line : bad) std::cout << "  " << line << "\n";
    return 1;
  }
  std::cout << "round-trip gates passed\n";
  return 0;
}

// ---------------------------------------------------------------------------
// family

int cmd_family(const RunConfig& cfg) {
  if (!is_set(cfg.beta)) {
    throw csgeo::ConfigError("family: --beta is required");
  }
  const std::vector<csgeo::CircleFamilyPoint> pts =
      csgeo::circle_family(cfg.beta, cfg.samples);

  const std::string format = cfg.format.empty() ? "csv" : cfg.format;
  std::vector<std::string> written;
  if (format == "csv") {
    write_file(cfg.out_dir, "family.csv", csgeo::family_to_csv(pts), written);
  } else {
    write_file(cfg.out_dir, "family.json", csgeo::family_to_json(cfg.beta, pts),
               written);
  }

  double worst = 0.0;
  int kenmotsu = 0, new_family = 0;
  for (const auto& p : pts) {
    worst = std::max(worst, std::abs(p.membership_residual));
    if (p.kenmotsu) ++kenmotsu;
    if (p.new_family) ++new_family;
  }
  std::cout << "family: beta=" << format_double(cfg.beta) << ", "
            << pts.size() << " samples, worst membership residual "
            << format_double(worst) << "\n";
  std::cout << "flags: kenmotsu=" << kenmotsu << ", new_family=" << new_family
            << "\n";
  std::cout << "wrote: " << join(written, ", ") << "\n";
  if (!(worst < 1e-12)) {
    std::cout << "family membership residual exceeded 1e-12\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

class CheckList {
 public:
  CheckList(std::string group, double tol_override)
      : group_(std::move(group)), tol_override_(tol_override) {}

  void add(std::vector<Check>& out, const std::string& name, double value,
           double threshold) const {
    Check c;
    c.group = group_;
    c.name = name;
    c.value = value;
    c.threshold = is_set(tol_override_) ? tol_override_ : threshold;
    c.pass = value <= c.threshold;  // NaN never passes
    out.push_back(std::move(c));
  }

  // Boolean condition: encoded as 0 (holds) vs 1 (violated) against gate 0.
  void flag(std::vector<Check>& out, const std::string& name,
            bool holds) const {
    add(out, name, holds ? 0.0 : 1.0, 0.0);
  }

 private:
  std::string group_;
  double tol_override_;
};

double field_max_dev(const csgeo::ScalarField& f, double target) {
  double m = 0.0;
  for (double x : f.values) {
    if (std::isfinite(x)) m = std::max(m, std::abs(x - target));
  }
  return m;
}

bool identity_report_has_nan(const csgeo::IdentityReport& rep) {
  for (const auto& s : rep.stats) {
    if (std::isnan(s.max_abs) || std::isnan(s.mean_abs) ||
        std::isnan(s.max_norm) || std::isnan(s.guarded_fraction)) {
      return true;
    }
  }
  return false;
}

double identity_value(const csgeo::IdentityReport& rep,
                      const std::string& name) {
  const csgeo::IdentityStat* s = rep.find(name);
  if (!s || !s->applicable) return std::numeric_limits<double>::infinity();
  return s->max_abs;
}

void verify_solver(const CheckList& cl, std::vector<Check>& out) {
  const double betas[] = {0.9, 1.0, 1.1, M_PI / 3.0, 1.4};
  const char* labels[] = {"0.9", "1.0", "1.1", "pi3", "1.4"};
  for (int i = 0; i < 5; ++i) {
    const std::vector<csgeo::ConstantBranch> branches =
        csgeo::solve_constant_invariants(betas[i]);
    double worst_compat = 0.0, worst_member = 0.0;
    for (const auto& br : branches) {
      const csgeo::MaurerCartan mc =
          csgeo::assemble_maurer_cartan(br.constants);
      worst_compat = std::max(worst_compat, mc.compat_residual);
      worst_member = std::max(
          worst_member, std::abs(csgeo::circle_membership(
                            br.constants.beta, br.constants.a,
                            br.constants.b)));
    }
    cl.add(out, std::string("branch_compat_beta_") + labels[i], worst_compat,
           1e-10);
    cl.add(out, std::string("circle_membership_beta_") + labels[i],
           worst_member, 1e-10);
  }

  // The analytic anchor at beta = pi/3 through both routes.
  const std::vector<csgeo::ConstantBranch> branches =
      csgeo::solve_constant_invariants(M_PI / 3.0);
  double solver_dev = std::numeric_limits<double>::infinity();
  for (const auto& br : branches) {
    solver_dev = std::min(
        solver_dev, std::abs(br.constants.a * br.constants.a - 2.0 / 7.0));
  }
  cl.add(out, "anchor_a2_solver", solver_dev, 1e-12);

  const double sb = std::sin(M_PI / 3.0), cb = std::cos(M_PI / 3.0);
  const double b0 = cb / (1.0 + sb * sb);
  const double r = std::sqrt(2.0) * sb * sb / (1.0 + sb * sb);
  cl.add(out, "anchor_a2_circle", std::abs(r * r - b0 * b0 - 2.0 / 7.0),
         1e-12);
}

void verify_roundtrip(const RunConfig& cfg, const CheckList& cl,
                      std::vector<Check>& out) {
  const std::vector<csgeo::ConstantBranch> branches =
      csgeo::solve_constant_invariants(M_PI / 3.0);
  const csgeo::InvariantConstants k = branches.front().constants;
  csgeo::GridSpec grid = reconstruction_grid(cfg);
  const csgeo::RoundtripReport rt =
      csgeo::roundtrip_verify(k, grid, analysis_options(cfg));

  cl.add(out, "compat_residual", rt.compat_residual, 1e-10);
  cl.add(out, "sphere_residual", rt.max_sphere_residual, 1e-9);
  cl.add(out, "orthogonality_defect", rt.max_orthogonality_defect,
         csgeo::tol::kFrameOrthogonality);
  cl.add(out, "beta_dev", rt.beta_dev, 1e-6);
  cl.add(out, "alpha_dev", rt.alpha_dev, 1e-6);
  cl.add(out, "a_dev", rt.a_dev, 1e-5);
  cl.add(out, "b_dev", rt.b_dev, 1e-6);
  cl.add(out, "max_minimality", rt.max_minimality, 1e-5);

  const csgeo::IdentityReport& ids = rt.analysis.identities;
  for (const auto& [name, thr] : identity_gates()) {
    cl.add(out, name, identity_value(ids, name), thr);
  }
}

void verify_legendrian(const csgeo::AnalysisResult& res, const CheckList& cl,
                       std::vector<Check>& out) {
  cl.add(out, "beta_dev_from_pi_2", field_max_dev(res.beta, M_PI / 2.0), 1e-9);
  cl.add(out, "max_minimality", res.max_minimality, 1e-6);
  cl.flag(out, "all_legendrian", res.all_legendrian);
  cl.add(out, "K_gauss_vs_intrinsic",
         identity_value(res.identities, "K_gauss_vs_intrinsic"), 1e-6);
  cl.flag(out, "no_nan_in_identities",
          !identity_report_has_nan(res.identities));
  int not_gated = 0;
  for (const char* name :
       {"K_conex_vs_intrinsic", "lapla_beta", "theorem1", "a_closure"}) {
    const csgeo::IdentityStat* s = res.identities.find(name);
    if (!s || s->applicable) ++not_gated;
  }
  cl.add(out, "tan_beta_identities_gated", static_cast<double>(not_gated),
         0.0);
}

void verify_legendrian_metric(const csgeo::Fixture& f, const CheckList& cl,
                              std::vector<Check>& out) {
  const csgeo::expr::ExpressionSurface surf(f.ast);
  double de = 0.0, df = 0.0, dg = 0.0;
  for (int i = 0; i < f.grid.nu; ++i) {
    for (int j = 0; j < f.grid.nv; ++j) {
      const csgeo::Metric2 m =
          csgeo::first_fundamental(surf.jet(f.grid.u(i), f.grid.v(j)));
      de = std::max(de, std::abs(m.E - 2.0 / 3.0));
      df = std::max(df, std::abs(m.F - 1.0 / 3.0));
      dg = std::max(dg, std::abs(m.G - 2.0 / 3.0));
    }
  }
  cl.add(out, "metric_E_dev", de, 1e-12);
  cl.add(out, "metric_F_dev", df, 1e-12);
  cl.add(out, "metric_G_dev", dg, 1e-12);
}

bool raises(const csgeo::Fixture& f, bool want_contact_zero) {
  const csgeo::expr::ExpressionSurface surf(f.ast);
  const double u = f.grid.u(f.grid.nu / 2);
  const double v = f.grid.v(f.grid.nv / 2);
  try {
    (void)csgeo::adapted_frame(surf.jet(u, v));
  } catch (const csgeo::ContactAngleZero&) {
    return want_contact_zero;
  } catch (const csgeo::HolomorphicAngleDegenerate&) {
    return !want_contact_zero;
  } catch (const csgeo::Error&) {
    return false;
  }
  return false;
}

void verify_clifford_s3(const csgeo::Fixture& f,
                        const csgeo::AnalysisResult& res, const CheckList& cl,
                        std::vector<Check>& out) {
  cl.flag(out, "raises_contact_angle_zero", raises(f, true));
  int zero_guards = 0;
  const auto it = res.guard_counts.find("contact_angle_zero");
  if (it != res.guard_counts.end()) zero_guards = it->second;
  cl.flag(out, "contact_angle_zero_everywhere",
          zero_guards == f.grid.size());
  cl.add(out, "max_minimality", res.max_minimality, 1e-9);
  cl.add(out, "max_abs_k_intrinsic", field_max_dev(res.k_intrinsic, 0.0),
         1e-9);
}

void verify_great_sphere(const csgeo::Fixture& f,
                         const csgeo::AnalysisResult& res, const CheckList& cl,
                         std::vector<Check>& out) {
  cl.flag(out, "raises_alpha_degenerate", raises(f, false));
  int degenerate = 0;
  const auto it = res.guard_counts.find("alpha_degenerate");
  if (it != res.guard_counts.end()) degenerate = it->second;
  cl.flag(out, "alpha_degenerate_everywhere", degenerate == f.grid.size());
  double beta_dev = 0.0;
  for (int i = 0; i < f.grid.nu; ++i) {
    for (int j = 0; j < f.grid.nv; ++j) {
      const double b = res.beta.at(i, j);
      if (std::isfinite(b)) {
        beta_dev = std::max(beta_dev, std::abs(b - f.grid.v(j)));
      }
    }
  }
  cl.add(out, "beta_equals_v", beta_dev, 1e-9);
  cl.add(out, "max_minimality", res.max_minimality, 1e-9);
  // Brioschi curvature vs the round value 1, away from one-sided edge
  // stencils.
  double k_dev = 0.0;
  for (int i = 0; i < f.grid.nu; ++i) {
    for (int j = 2; j + 2 < f.grid.nv; ++j) {
      const double k = res.k_intrinsic.at(i, j);
      if (std::isfinite(k)) k_dev = std::max(k_dev, std::abs(k - 1.0));
    }
  }
  cl.add(out, "k_intrinsic_is_one", k_dev, 5e-3);
}

void verify_clifford_nonminimal(const csgeo::Fixture& f,
                                const csgeo::AnalysisResult& res,
                                const CheckList& cl,
                                std::vector<Check>& out) {
  cl.flag(out, "raises_contact_angle_zero", raises(f, true));
  // |H| = 2 cot(2r) at r = pi/6.
  cl.add(out, "h_norm_anchor",
         std::abs(res.max_minimality - 2.0 / std::sqrt(3.0)), 1e-9);
}

std::string verify_report_json(const std::vector<Check>& checks) {
  nlohmann::ordered_json root;
  root["checks"] = nlohmann::ordered_json::array();
  int passed = 0;
  for (const auto& c : checks) {
    nlohmann::ordered_json row;
    row["group"] = c.group;
    row["check"] = c.name;
    row["value"] = c.value;
    row["threshold"] = c.threshold;
    row["pass"] = c.pass;
    root["checks"].push_back(std::move(row));
    if (c.pass) ++passed;
  }
  root["passed"] = passed;
  root["failed"] = static_cast<int>(checks.size()) - passed;
  root["total"] = static_cast<int>(checks.size());
  return root.dump(2) + "\n";
}

std::string verify_report_csv(const std::vector<Check>& checks) {
  std::ostringstream out;
  out << "group,check,value,threshold,result\n";
  for (const auto& c : checks) {
    out << c.group << ',' << c.name << ',' << format_double(c.value) << ','
        << format_double(c.threshold) << ','
        << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  return out.str();
}

int cmd_verify(const RunConfig& cfg) {
  const std::string& filter = cfg.fixtures_filter;
  const auto selected = [&filter](const std::string& group) {
    return filter.empty() || group.find(filter) != std::string::npos;
  };

  std::vector<Check> checks;

  if (selected("solver")) {
    verify_solver(CheckList("solver", cfg.tol), checks);
  }
  if (selected("roundtrip_pi3")) {
    verify_roundtrip(cfg, CheckList("roundtrip_pi3", cfg.tol), checks);
  }

  for (const csgeo::Fixture& f : csgeo::builtin_fixtures()) {
    if (!selected(f.name)) continue;
    const CheckList cl(f.name, cfg.tol);
    const csgeo::expr::ExpressionSurface surf(f.ast);
    const csgeo::AnalysisResult res =
        csgeo::analyze_surface(surf, f.grid, analysis_options(cfg));
    if (f.name == "legendrian_torus") {
      verify_legendrian(res, cl, checks);
      verify_legendrian_metric(f, cl, checks);
    } else if (f.name == "clifford_s3") {
      verify_clifford_s3(f, res, cl, checks);
    } else if (f.name == "great_sphere") {
      verify_great_sphere(f, res, cl, checks);
    } else if (f.name == "clifford_nonminimal") {
      verify_clifford_nonminimal(f, res, cl, checks);
    }
  }

  if (checks.empty()) {
    throw csgeo::ConfigError("verify: no check group matches --fixtures '" +
                             filter + "'");
  }

  std::vector<std::string> written;
  write_file(cfg.out_dir, "verify_report.json", verify_report_json(checks),
             written);
  write_file(cfg.out_dir, "verify_report.csv", verify_report_csv(checks),
             written);

  std::size_t group_w = 5, name_w = 5;
  for (const auto& c : checks) {
    group_w = std::max(group_w, c.group.size());
    name_w = std::max(name_w, c.name.size());
  }
  int passed = 0;
  std::cout << std::left << std::setw(static_cast<int>(group_w) + 2) << "group"
            << std::setw(static_cast<int>(name_w) + 2) << "check"
            << std::setw(26) << "value" << std::setw(26) << "threshold"
            << "result\n";
  for (const auto& c : checks) {
    std::cout << std::left << std::setw(static_cast<int>(group_w) + 2)
              << c.group << std::setw(static_cast<int>(name_w) + 2) << c.name
              << std::setw(26) << format_double(c.value) << std::setw(26)
              << format_double(c.threshold) << (c.pass ? "PASS" : "FAIL")
              << "\n";
    if (c.pass) ++passed;
  }
  std::cout << passed << "/" << checks.size() << " checks passed\n";
  std::cout << "wrote: " << join(written, ", ") << "\n";
  return passed == static_cast<int>(checks.size()) ? 0 : 1;
}

// ---------------------------------------------------------------------------

int dispatch(const RunConfig& cfg) {
  if (cfg.subcommand == "analyze") return cmd_analyze(cfg);
  if (cfg.subcommand == "reconstruct") return cmd_reconstruct(cfg);
  if (cfg.subcommand == "family") return cmd_family(cfg);
  return cmd_verify(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"contact-geometry analysis of surfaces in the unit 5-sphere"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "csgeo 0.1.0");

  const auto add_common = [&cfg](CLI::App* sub) {
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--grid", cfg.grid_text, "grid dimensions as NxM");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.format, "report format: json or csv");
    sub->add_option("--h", cfg.h, "connection differencing step");
    sub->add_option("--config", cfg.config_path,
                    "JSON config file; its values override flags");
  };

  CLI::App* an = app.add_subcommand(
      "analyze", "analyze a surface spec file or built-in fixture");
  an->add_option("input", cfg.input, "surface spec file or fixture name")
      ->required();
  an->add_flag("--strict", cfg.strict, "exit 1 on identity gate failures");
  add_common(an);

  CLI::App* rc = app.add_subcommand(
      "reconstruct", "rebuild a constant-invariant minimal surface");
  rc->add_option("--beta", cfg.beta, "contact angle");
  rc->add_option("--alpha", cfg.alpha, "holomorphic angle (explicit mode)");
  rc->add_option("--a", cfg.a, "shape coefficient a (explicit mode)");
  rc->add_option("--b", cfg.b, "shape coefficient b (explicit mode)");
  add_common(rc);

  CLI::App* fam = app.add_subcommand(
      "family", "sample the invariant circle at a contact angle");
  fam->add_option("--beta", cfg.beta, "contact angle");
  fam->add_option("-n,--n", cfg.samples, "number of samples");
  add_common(fam);

  CLI::App* vf = app.add_subcommand(
      "verify", "run the consolidated fixture and round-trip suite");
  vf->add_option("--fixtures", cfg.fixtures_filter,
                 "substring filter on check groups");
  vf->add_option("--tol", cfg.tol, "override every check threshold");
  add_common(vf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    apply_config_overlay(cfg);
    validate_config(cfg);
    return dispatch(cfg);
  } catch (const csgeo::ParseError& e) {
    std::cerr << "error: " << e.what();
    if (std::string(e.what()).find("offset") == std::string::npos) {
      std::cerr << " at offset " << e.offset();
      if (!e.expected().empty()) {
        std::cerr << "; expected " << join(e.expected(), ", ");
      }
    }
    std::cerr << "\n";
    return 2;
  } catch (const csgeo::UnknownIdentifier& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csgeo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csgeo::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const csgeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
