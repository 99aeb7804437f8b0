#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "smirnovkit/spec_io.hpp"

namespace {

bool parse_point(const std::string& text, smirnovkit::Complex& out) {
  double re = 0.0;
  double im = 0.0;
  char extra = 0;
  const int got = std::sscanf(text.c_str(), "%lf,%lf%c", &re, &im, &extra);
  if (got == 1) {
    out = {re, 0.0};
    return true;
  }
  if (got != 2) return false;
  out = {re, im};
  return true;
}

bool parse_ladder(const std::string& text, smirnovkit::RunConfig& config) {
  int j_min = 0;
  int j_max = 0;
  double r_max = 0.0;
  char extra = 0;
  const int got = std::sscanf(text.c_str(), "%d:%d:%lf%c", &j_min, &j_max, &r_max, &extra);
  if (got != 2 && got != 3) return false;
  config.ladder_j_min = j_min;
  config.ladder_j_max = j_max;
  if (got == 3) config.ladder_r_max = r_max;
  return true;
}

bool parse_rect(const std::string& text, smirnovkit::RunConfig& config) {
  std::array<double, 5> r{};
  char extra = 0;
  const int got = std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf,%lf%c", &r[0], &r[1], &r[2], &r[3],
                              &r[4], &extra);
  if (got != 5) return false;
  config.lambda_rect = r;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolkit for matrix-valued analytic functions on the unit disc"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string spec_path;
  std::string ladder_text;
  std::string rect_text;
  std::string z_text;
  smirnovkit::RunConfig config;

  app.add_option("--spec", spec_path, "path to a function-spec JSON document")->required();
  app.add_option("--nodes", config.grid_nodes, "circle grid size (power of two, at least 64)")
      ->envname("SMIRNOVKIT_NODES");
  app.add_option("--ladder", ladder_text, "radial ladder jmin:jmax[:rmax], radii 1 - 2^-j");
  app.add_option("--lambda-rect", rect_text, "spectral rectangle re0,re1,im0,im1,step");
  app.add_option("--z", z_text, "evaluation point, re[,im]");
  app.add_option("--out", config.out_path, "output CSV path (default: stdout)")
      ->envname("SMIRNOVKIT_OUT");
  app.add_option("--tol-quad", config.tol_quad, "quadrature equality tolerance");
  app.add_option("--gap-tol", config.gap_tol, "Blaschke-verdict gap threshold");
  app.add_option("--boundary-tol", config.boundary_tol, "boundary unitarity tolerance");
  app.add_option("--k-max", config.k_max, "largest index of the weak-invertibility sequence");

  app.add_subcommand("eval", "evaluate the function at --z and emit its entries");
  app.add_subcommand("classify", "inner / singular / Blaschke classification");
  app.add_subcommand("check-smirnov", "Smirnov-class membership diagnostics");
  app.add_subcommand("factor-scalar", "inner-outer split of a scalar function");
  app.add_subcommand("frostman-scan", "Blaschke gap of F - lambda I over --lambda-rect");
  app.add_subcommand("potential", "logarithmic potentials of the spec's measure");
  app.add_subcommand("weak-invert", "inverse-approximating sequence for an outer function");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!ladder_text.empty() && !parse_ladder(ladder_text, config)) {
    std::cerr << "error: --ladder expects jmin:jmax[:rmax]\n";
    return 2;
  }
  if (!rect_text.empty() && !parse_rect(rect_text, config)) {
    std::cerr << "error: --lambda-rect expects re0,re1,im0,im1,step\n";
    return 2;
  }
  if (!z_text.empty()) {
    smirnovkit::Complex z;
    if (!parse_point(z_text, z)) {
      std::cerr << "error: --z expects re[,im]\n";
      return 2;
    }
    config.eval_point = z;
  }

  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open spec file " << spec_path << '\n';
    return 2;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  smirnovkit::FunctionSpecDocument doc;
  try {
    doc = smirnovkit::parse_spec(buffer.str());
  } catch (const smirnovkit::SpecError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  return smirnovkit::run_subcommand(app.get_subcommands().front()->get_name(), doc, config);
}
