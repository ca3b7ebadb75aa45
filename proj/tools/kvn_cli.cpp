// kvn: run, converge and check KvN scenarios.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kvn/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving KvN simulator on bounded domains"};
  app.require_subcommand(1);

  std::string run_cfg, run_out;
  auto* run = app.add_subcommand("run", "propagate a scenario, compare with the oracle and write all outputs");
  run->add_option("config", run_cfg, "scenario file")->required();
  run->add_option("--out", run_out, "output directory (overrides output.dir)");

  std::string conv_cfg, conv_out;
  std::vector<int> ladder;
  auto* conv = app.add_subcommand("converge", "run a resolution ladder and measure observed orders");
  conv->add_option("config", conv_cfg, "scenario file")->required();
  conv->add_option("--ladder", ladder, "resolutions, e.g. 64,128,256")->delimiter(',');
  conv->add_option("--out", conv_out, "output directory (overrides output.dir)");

  std::string check_cfg;
  auto* check = app.add_subcommand("check", "static checks only: grid, classification, operator properties");
  check->add_option("config", check_cfg, "scenario file")->required();

  app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kvn::kExitPass : kvn::kExitUsage;
  }

  auto out_dir = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };

  if (*run) return kvn::run_command(run_cfg, out_dir(run_out), std::cout, std::cerr);
  if (*conv) {
    std::optional<std::vector<int>> l;
    if (!ladder.empty()) l = ladder;
    return kvn::converge_command(conv_cfg, l, out_dir(conv_out), std::cout, std::cerr);
  }
  if (*check) return kvn::check_command(check_cfg, std::cout, std::cerr);
  std::cout << "kvn " << kvn::kVersion << '\n';
  return kvn::kExitPass;
}
