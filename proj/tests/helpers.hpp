#pragma once

// Shared fixtures and oracles for the unit and acceptance suites.

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "csgeo/analysis.hpp"
#include "csgeo/fixtures.hpp"
#include "csgeo/reconstruct.hpp"

namespace tst {

inline constexpr double kPi = std::numbers::pi;

// The flat-torus branch at beta = pi/3: alpha = pi/2, a^2 = 2/7, b = 0.
inline constexpr double kBetaStar = kPi / 3.0;
inline constexpr double kAlphaStar = kPi / 2.0;
inline const double kAStar = std::sqrt(2.0 / 7.0);

inline csgeo::InvariantConstants branch_constants() {
  csgeo::InvariantConstants k;
  k.beta = kBetaStar;
  k.alpha = kAlphaStar;
  k.a = kAStar;
  k.b = 0.0;
  return k;
}

inline csgeo::GridSpec open_grid(int n, double extent = 2.0 * kPi) {
  csgeo::GridSpec g;
  g.nu = g.nv = n;
  g.u0 = g.v0 = 0.0;
  g.extent_u = g.extent_v = extent;
  g.periodic_u = g.periodic_v = false;
  return g;
}

inline csgeo::GridSpec periodic_grid(int n, double extent = 2.0 * kPi) {
  csgeo::GridSpec g = open_grid(n, extent);
  g.periodic_u = g.periodic_v = true;
  return g;
}

inline const csgeo::MaurerCartan& branch_connection() {
  static const csgeo::MaurerCartan mc =
      csgeo::assemble_maurer_cartan(branch_constants());
  return mc;
}

inline const csgeo::ReconstructedSurface& torus_surface() {
  static const csgeo::ReconstructedSurface surf(
      branch_connection(), csgeo::initial_adapted_frame(branch_constants()));
  return surf;
}

// One analysis of the reconstructed torus shared by several suites.
inline const csgeo::RoundtripReport& shared_roundtrip() {
  static const csgeo::RoundtripReport report = [] {
    return csgeo::roundtrip_verify(branch_constants(), open_grid(32));
  }();
  return report;
}

// ---------------------------------------------------------------------------
// Hand-differentiated 2-jets of the built-in examples.

using Cx = std::complex<double>;

inline Cx eiu(double t) { return Cx(std::cos(t), std::sin(t)); }

inline csgeo::Jet2 hand_jet_legendrian(double u, double v) {
  const double s = 1.0 / std::sqrt(3.0);
  const Cx i(0.0, 1.0);
  const Cx a = s * eiu(u), b = s * eiu(v), c = s * eiu(-(u + v));
  csgeo::Jet2 j;
  j.z << a, b, c;
  j.zu << i * a, Cx(0), -i * c;
  j.zv << Cx(0), i * b, -i * c;
  j.zuu << -a, Cx(0), -c;
  j.zuv << Cx(0), Cx(0), -c;
  j.zvv << Cx(0), -b, -c;
  return j;
}

// Product torus (cos r e^{iu}, sin r e^{iv}, 0); r = pi/4 is the minimal case.
inline csgeo::Jet2 hand_jet_product_torus(double u, double v, double r) {
  const Cx i(0.0, 1.0);
  const Cx a = std::cos(r) * eiu(u), b = std::sin(r) * eiu(v);
  csgeo::Jet2 j;
  j.z << a, b, Cx(0);
  j.zu << i * a, Cx(0), Cx(0);
  j.zv << Cx(0), i * b, Cx(0);
  j.zuu << -a, Cx(0), Cx(0);
  j.zuv << Cx(0), Cx(0), Cx(0);
  j.zvv << Cx(0), -b, Cx(0);
  return j;
}

inline csgeo::Jet2 hand_jet_great_sphere(double u, double v) {
  const Cx i(0.0, 1.0);
  const Cx e = eiu(u);
  csgeo::Jet2 j;
  j.z << std::cos(v) * e, Cx(std::sin(v)), Cx(0);
  j.zu << i * std::cos(v) * e, Cx(0), Cx(0);
  j.zv << -std::sin(v) * e, Cx(std::cos(v)), Cx(0);
  j.zuu << -std::cos(v) * e, Cx(0), Cx(0);
  j.zuv << -i * std::sin(v) * e, Cx(0), Cx(0);
  j.zvv << -std::cos(v) * e, Cx(-std::sin(v)), Cx(0);
  return j;
}

// Hand jet of a built-in example by name, pulling parameter values from the
// example itself so both sides describe the same immersion.
inline csgeo::Jet2 hand_jet(const csgeo::Fixture& fx, double u, double v) {
  if (fx.name == "legendrian_torus") return hand_jet_legendrian(u, v);
  if (fx.name == "great_sphere") return hand_jet_great_sphere(u, v);
  return hand_jet_product_torus(u, v, fx.ast.params.at("r"));
}

// Largest blockwise relative deviation between two jets.
inline double jet_rel_dev(const csgeo::Jet2& got, const csgeo::Jet2& want) {
  const csgeo::Complex3* gs[6] = {&got.z, &got.zu, &got.zv,
                                  &got.zuu, &got.zuv, &got.zvv};
  const csgeo::Complex3* ws[6] = {&want.z, &want.zu, &want.zv,
                                  &want.zuu, &want.zuv, &want.zvv};
  double dev = 0.0;
  for (int b = 0; b < 6; ++b) {
    double num = 0.0, den = 1.0;
    for (int k = 0; k < 3; ++k) {
      num = std::max(num, std::abs((*gs[b])[k] - (*ws[b])[k]));
      den = std::max(den, std::abs((*ws[b])[k]));
    }
    dev = std::max(dev, num / den);
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Subprocess helpers for exercising the installed CLI binary.

#ifdef CSGEO_BIN
inline int run_cli(const std::string& args) {
  const std::string cmd = std::string(CSGEO_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -2;
}
#endif

inline std::string fresh_out_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("csgeo_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace tst
