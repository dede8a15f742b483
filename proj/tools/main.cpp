#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "bnpspec/cli/commands.hpp"
#include "bnpspec/cli/config.hpp"

using namespace bnpspec::cli;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
  std::optional<std::string> n;
  std::optional<std::string> out;
  std::optional<std::string> input;
  std::optional<std::string> truth;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> chains;
  std::optional<std::size_t> n_iter;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> thin;
  std::optional<double> delta;
  std::optional<double> level;
  std::optional<std::size_t> cases;
  std::optional<std::size_t> perturbations;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--preset", f.preset, "cantor-ma1 | lipschitz-gauss");
}

void add_mcmc(CLI::App* cmd, Flags& f) {
  cmd->add_option("--chains", f.chains, "number of chains");
  cmd->add_option("--n-iter", f.n_iter, "iterations per chain");
  cmd->add_option("--burn-in", f.burn_in, "burn-in iterations");
  cmd->add_option("--thin", f.thin, "thinning interval");
  cmd->add_option("--delta", f.delta, "working-model exponent");
  cmd->add_option("--level", f.level, "credible level of the bands");
}

RunConfig build_config(const Flags& f, bool n_is_list) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config_file(f.config);
  if (f.seed) c.seed = f.seed;
  if (f.preset) c.preset = f.preset;
  if (f.n) {
    const auto list = parse_size_list(*f.n, "--n");
    if (n_is_list) {
      c.verify_n = list;
    } else {
      if (list.size() != 1) throw ConfigError("--n: expected a single sample size");
      c.n = list.front();
    }
  }
  if (f.out) c.output = *f.out;
  if (f.input) c.input = f.input;
  if (f.truth) c.truth = f.truth;
  if (f.replicates) c.replicates = f.replicates;
  if (f.chains) c.fit.mcmc.chains = *f.chains;
  if (f.n_iter) c.fit.mcmc.n_iter = *f.n_iter;
  if (f.burn_in) c.fit.mcmc.burn_in = *f.burn_in;
  if (f.thin) c.fit.mcmc.thin = *f.thin;
  if (f.delta) c.fit.delta = *f.delta;
  if (f.level) c.fit.level = *f.level;
  if (f.cases) c.cases = *f.cases;
  if (f.perturbations) c.perturbations = *f.perturbations;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric spectral density estimation with the corrected Whittle likelihood"};
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "simulate a preset series");
  add_common(sim, f);
  sim->add_option("--n", f.n, "sample size");

  auto* fit = app.add_subcommand("fit", "fit a series CSV");
  add_common(fit, f);
  fit->add_option("--input", f.input, "series CSV");
  fit->add_option("--truth", f.truth, "preset whose spectral density is the truth");
  add_mcmc(fit, f);

  std::string which;
  auto* ver = app.add_subcommand("verify", "run a verification check");
  ver->add_option("check", which, "szego | lln | h | contraction | props")->required();
  add_common(ver, f);
  ver->add_option("--n", f.n, "comma-separated sample sizes");
  ver->add_option("--replicates", f.replicates, "replicates per sample size");
  ver->add_option("--cases", f.cases, "property-sweep cases");
  ver->add_option("--perturbations", f.perturbations, "perturbations for the h check");
  add_mcmc(ver, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  return run_guarded(
      [&]() -> int {
        if (sim->parsed()) return cmd_simulate(build_config(f, false), std::cout);
        if (fit->parsed()) return cmd_fit(build_config(f, false), std::cout);
        return cmd_verify(build_config(f, true), which, std::cout);
      },
      std::cerr);
}
