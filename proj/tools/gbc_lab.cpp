#include <iostream>

#include "CLI11.hpp"
#include "gbclab/cli.hpp"
#include "gbclab/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gbc_lab: numerical checks for masses of graphic manifolds"};
  std::string config;
  gbclab::Overrides ov;
  std::string mode, out;
  int level = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON run configuration")->required();
  auto* mode_opt = app.add_option("--mode", mode, "check-identity, mass, balance, horizon, penrose or egb");
  auto* out_opt = app.add_option("--out", out, "output directory");
  auto* level_opt = app.add_option("--level", level, "sphere quadrature level");
  auto* alpha_opt = app.add_option("--alpha", alpha, "Gauss-Bonnet coupling");
  auto* seed_opt = app.add_option("--seed", seed, "sampling seed");
  app.add_flag("--quiet", ov.quiet, "do not print the summary");
  CLI11_PARSE(app, argc, argv);

  if (*mode_opt) ov.mode = mode;
  if (*out_opt) ov.out = out;
  if (*level_opt) ov.level = level;
  if (*alpha_opt) ov.alpha = alpha;
  if (*seed_opt) ov.seed = seed;
  try {
    const auto cfg = gbclab::load_config(config, ov);
    return gbclab::run(cfg, std::cout);
  } catch (const gbclab::Error& e) {
    std::cerr << "gbc_lab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "gbc_lab: unexpected failure: " << e.what() << "\n";
    return 1;
  }
}
