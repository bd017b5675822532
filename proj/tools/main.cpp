#include "randhall/app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral Hall MHD, electron MHD and hyperdissipative NSE with randomized data"};
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"verify-kernels", "Kernel-norm scaling and Beta-integral checks"},
      {"simulate", "Picard fixed point, ETD reference run and reports"},
      {"ensemble", "Free-evolution norm statistics over random draws"},
      {"contraction", "Lipschitz constant of the Duhamel map from random probe pairs"},
  };
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts, out_opts;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "Experiment config (INI)")->required()->check(CLI::ExistingFile);
    seed_opts.push_back(sub->add_option("--seed", seed, "Override [data] seed"));
    out_opts.push_back(sub->add_option("--out", out, "Override [output] directory"));
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : randhall::app::kValidationError;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    randhall::app::Overrides overrides;
    if (seed_opts[i]->count()) overrides.seed = seed;
    if (out_opts[i]->count()) overrides.output = out;
    return randhall::app::run(subs[i]->get_name(), config, overrides);
  }
  return randhall::app::kValidationError;
}
