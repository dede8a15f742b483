#include "bnpspec/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <numeric>

#include "json.hpp"

#include "bnpspec/build_info.hpp"
#include "bnpspec/errors.hpp"
#include "bnpspec/fit.hpp"
#include "bnpspec/series_io.hpp"
#include "bnpspec/simulate.hpp"
#include "bnpspec/verify.hpp"

namespace bnpspec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultVerifySeed = 20240601;

std::uint64_t require_seed(const RunConfig& c, const std::string& command) {
  if (!c.seed) throw ConfigError("config field 'seed' is required for " + command + " (or pass --seed)");
  return *c.seed;
}

Preset preset_field(const std::string& name, const std::string& field) {
  try {
    return parse_preset(name);
  } catch (const InvalidInput& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

fs::path prepare_output(const RunConfig& c) {
  fs::path dir(c.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output: cannot create directory '" + c.output + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("output: cannot write '" + p.string() + "'");
  f << std::setprecision(17);
  return f;
}

json build_json() {
  const auto b = build_info();
  return {{"version", b.version}, {"compiler", b.compiler}, {"fftw", b.fftw},
          {"eigen", b.eigen},     {"openmp", b.openmp},     {"max_threads", b.max_threads}};
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& c, const json& seeds,
                    const std::vector<std::string>& outputs) {
  const json cfg = c.to_json();
  json m;
  m["command"] = command;
  m["config_hash"] = "fnv1a64:" + fnv1a_hex(cfg.dump());
  m["config"] = cfg;
  m["build"] = build_json();
  m["seeds"] = seeds;
  m["outputs"] = outputs;
  auto f = open_out(dir / "manifest.json");
  f << m.dump(2) << '\n';
}

void write_json(const fs::path& p, const json& j) {
  auto f = open_out(p);
  f << j.dump(2) << '\n';
}

json rates_json(const BlockRates& r) { return {{"v", r.v}, {"z", r.z}, {"tau", r.tau}, {"k", r.k}}; }

json series_stats(const std::vector<double>& v) {
  if (v.empty()) return json::object();
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const auto half = v.size() / 2;
  const double first = std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half), 0.0) /
                       static_cast<double>(std::max<std::size_t>(half, 1));
  const double second = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(half), v.end(), 0.0) /
                        static_cast<double>(v.size() - half);
  return {{"mean", mean},
          {"sd", std::sqrt(ss / n)},
          {"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())},
          {"first_half_mean", first},
          {"second_half_mean", second}};
}

json metrics_json(const SummaryMetrics& m) {
  return {{"sup_error", m.sup_error},
          {"integrated_abs_error", m.integrated_abs_error},
          {"pointwise_coverage", m.pointwise_coverage},
          {"uniform_coverage", m.uniform_coverage},
          {"pointwise_covers", m.pointwise_covers},
          {"uniform_covers", m.uniform_covers}};
}

// verify sub-commands: each fills report.csv and returns (passed, details).

struct VerifyOutcome {
  bool passed = false;
  json details;
};

std::vector<std::size_t> n_list_or(const RunConfig& c, std::vector<std::size_t> fallback) {
  return c.verify_n.empty() ? fallback : c.verify_n;
}

VerifyOutcome verify_szego(const RunConfig& c, std::ostream& report, std::ostream& log) {
  const Preset p = preset_field(c.preset.value_or("cantor-ma1"), "data.preset");
  const auto n_list = n_list_or(c, {128, 512, 1024});
  const auto phi = preset_truth(p);
  constexpr double kTol = 0.02;
  report << "function,n,value,limit,error\n";
  VerifyOutcome out;
  out.passed = true;
  for (auto [f, name] : {std::pair{SzegoFunction::log, "log"}, std::pair{SzegoFunction::identity, "identity"}}) {
    const auto rows = szego_verify(phi, f, n_list);
    for (const auto& r : rows)
      report << name << ',' << r.n << ',' << r.value << ',' << r.limit << ',' << r.error << '\n';
    // The identity case is exact up to rounding; compare it on an absolute floor.
    const bool ok = f == SzegoFunction::log ? convergence_ok(rows, kTol) : rows.back().error < 1e-9;
    out.details[name] = {{"final_error", rows.back().error}, {"passed", ok}};
    log << "szego " << name << ": final error " << rows.back().error << (ok ? " ok" : " FAIL") << '\n';
    out.passed = out.passed && ok;
  }
  out.details["preset"] = preset_name(p);
  out.details["tolerance"] = kTol;
  return out;
}

VerifyOutcome verify_lln(const RunConfig& c, std::uint64_t seed, std::ostream& report, std::ostream& log) {
  const Preset p = preset_field(c.preset.value_or("cantor-ma1"), "data.preset");
  const auto n_list = n_list_or(c, {128, 512, 2048});
  const std::size_t reps = c.replicates.value_or(200);
  const auto phi = preset_truth(p);
  const double gamma0 = preset_acf(p, 0).at(0);
  const auto wm = WorkingModel::white_noise(gamma0, n_list.front());
  const SeriesGenerator gen = [p](std::size_t n, std::uint64_t s) { return simulate_preset(p, n, s); };
  const auto acf = [p](std::size_t n) { return preset_acf(p, n - 1); };
  const auto rows = quadratic_form_lln_check(gen, acf, phi, wm, n_list, reps, seed);
  report << "n,expected,mean_deviation,sd_deviation,iqr_deviation\n";
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    report << r.n << ',' << r.expected << ',' << r.mean_deviation << ',' << r.sd_deviation << ','
           << r.iqr_deviation << '\n';
    if (i > 0 && !(r.iqr_deviation < rows[i - 1].iqr_deviation)) decreasing = false;
    log << "lln n=" << r.n << ": iqr " << r.iqr_deviation << '\n';
  }
  VerifyOutcome out;
  out.passed = decreasing;
  out.details = {{"preset", preset_name(p)}, {"replicates", reps}, {"iqr_decreasing", decreasing}};
  return out;
}

VerifyOutcome verify_h(const RunConfig& c, std::uint64_t seed, std::ostream& report, std::ostream& log) {
  const Preset p = preset_field(c.preset.value_or("lipschitz-gauss"), "data.preset");
  const auto phi0 = preset_truth(p);
  const auto bounds = truth_theta_bounds(phi0);
  Rng rng(seed);
  const auto perturbations = bernstein_perturbations(phi0, bounds, c.perturbations, rng);
  const auto rep = h_minimizer_check(phi0, perturbations, bounds);

  const auto white = SpectralFn::constant(1.0 / (2.0 * std::numbers::pi));
  const double h_white = h_functional(white, white).value;
  const double h_white_expected = 0.5 * std::log(2.0 * std::numbers::pi) + 0.5;
  const bool white_ok = std::abs(h_white - h_white_expected) < 1e-8;

  report << "item,index,value\n";
  report << "h_white,0," << h_white << '\n';
  report << "h_phi0,0," << rep.h0 << '\n';
  for (std::size_t i = 0; i < rep.gaps.size(); ++i) report << "gap," << i << ',' << rep.gaps[i] << '\n';
  report << "max_lipschitz_ratio,0," << rep.max_lipschitz_ratio << '\n';

  VerifyOutcome out;
  out.passed = white_ok && rep.passed();
  out.details = {{"preset", preset_name(p)},
                 {"m", bounds.m},
                 {"M_bound", bounds.M_bound},
                 {"h_white", h_white},
                 {"h_white_expected", h_white_expected},
                 {"h_white_ok", white_ok},
                 {"h_phi0", rep.h0},
                 {"perturbations", rep.gaps.size()},
                 {"min_gap", rep.gaps.empty() ? 0.0 : *std::min_element(rep.gaps.begin(), rep.gaps.end())},
                 {"unique_minimum", rep.unique_minimum},
                 {"lipschitz_pairs", rep.lipschitz_pairs},
                 {"lipschitz_violations", rep.lipschitz_violations},
                 {"max_lipschitz_ratio", rep.max_lipschitz_ratio},
                 {"sup_bound_violations", rep.sup_bound_violations}};
  log << "h: h(phi0)=" << rep.h0 << ", " << rep.gaps.size() << " perturbations, "
      << rep.lipschitz_violations << " Lipschitz violations" << (out.passed ? " ok" : " FAIL") << '\n';
  return out;
}

VerifyOutcome verify_contraction(const RunConfig& c, std::uint64_t seed, std::ostream& report, std::ostream& log) {
  const Preset p = preset_field(c.preset.value_or("cantor-ma1"), "data.preset");
  const auto n_list = n_list_or(c, {128, 256, 512});
  const std::size_t reps = c.replicates.value_or(10);
  const auto truth = preset_truth(p);
  const double radius = c.radius_fraction * truth.grid_max(4097);
  const SeriesGenerator gen = [p](std::size_t n, std::uint64_t s) { return simulate_preset(p, n, s); };
  const auto res = contraction_experiment(truth, gen, n_list, reps, c.fit, radius, seed);

  report << "n,replicate,seed,ok,iae,sup_error,outside_mass,uniform_covers,seconds,error\n";
  for (const auto& cell : res.cells) {
    report << cell.n << ',' << cell.replicate << ',' << cell.seed << ',' << (cell.ok ? 1 : 0) << ',' << cell.iae
           << ',' << cell.sup_error << ',' << cell.outside_mass << ',' << (cell.uniform_covers ? 1 : 0) << ','
           << cell.seconds << ",\"" << cell.error << "\"\n";
  }
  bool decreasing = true;
  bool complete = true;
  json rows = json::array();
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    if (r.fitted == 0) complete = false;
    if (i > 0 && !(r.median_iae < res.rows[i - 1].median_iae)) decreasing = false;
    rows.push_back({{"n", r.n},
                    {"fitted", r.fitted},
                    {"median_iae", r.median_iae},
                    {"median_sup_error", r.median_sup_error},
                    {"median_outside_mass", r.median_outside_mass}});
    log << "contraction n=" << r.n << ": median IAE " << r.median_iae << ", outside mass "
        << r.median_outside_mass << " (" << r.fitted << " fits)\n";
  }
  const double final_mass = res.rows.empty() ? 1.0 : res.rows.back().median_outside_mass;
  VerifyOutcome out;
  out.passed = complete && decreasing && final_mass < 0.1;
  out.details = {{"preset", preset_name(p)},     {"replicates", reps},       {"radius", radius},
                 {"iae_decreasing", decreasing}, {"final_outside_mass", final_mass}, {"rows", rows}};
  return out;
}

VerifyOutcome verify_props(const RunConfig& c, std::uint64_t seed, std::ostream& report, std::ostream& log) {
  const auto r = bernstein_property_sweep(c.cases, seed);
  report << "cases,sup_violations,lipschitz_violations,kantorovich_violations,partition_max_error\n";
  report << r.cases << ',' << r.sup_violations << ',' << r.lipschitz_violations << ',' << r.kantorovich_violations
         << ',' << r.partition_max_error << '\n';
  log << "props: " << r.cases << " cases, violations sup " << r.sup_violations << ", lipschitz "
      << r.lipschitz_violations << ", kantorovich " << r.kantorovich_violations << '\n';
  VerifyOutcome out;
  out.passed = r.passed();
  out.details = {{"cases", r.cases},
                 {"sup_violations", r.sup_violations},
                 {"lipschitz_violations", r.lipschitz_violations},
                 {"kantorovich_violations", r.kantorovich_violations},
                 {"partition_max_error", r.partition_max_error}};
  return out;
}

}  // namespace

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  const std::uint64_t seed = require_seed(c, "simulate");
  if (!c.preset) throw ConfigError("config field 'data.preset' is required for simulate (or pass --preset)");
  if (!c.n) throw ConfigError("config field 'data.n' is required for simulate (or pass --n)");
  const Preset p = preset_field(*c.preset, "data.preset");
  if (*c.n < 8 || *c.n > 8192) throw ConfigError("data.n must lie in [8, 8192]");

  const auto x = simulate_preset(p, *c.n, seed);
  const auto dir = prepare_output(c);
  {
    auto f = open_out(dir / "series.csv");
    write_series_csv(f, x,
                     {{"generator", preset_name(p)},
                      {"seed", std::to_string(seed)},
                      {"n", std::to_string(x.size())},
                      {"mean_centered", x.mean_centered() ? "true" : "false"}});
  }
  const auto truth = preset_truth(p);
  constexpr std::size_t kGrid = 512;
  std::vector<double> grid(kGrid), values(kGrid);
  for (std::size_t i = 0; i < kGrid; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(kGrid - 1);
    values[i] = truth(grid[i]);
  }
  json meta;
  meta["generator"] = preset_name(p);
  meta["seed"] = seed;
  meta["n"] = x.size();
  meta["mean_centered"] = x.mean_centered();
  meta["acf"] = preset_acf(p, 9);
  meta["truth"] = {{"closed_form", true}, {"grid", grid}, {"values", values}};
  write_json(dir / "metadata.json", meta);
  write_manifest(dir, "simulate", c, {{"master", seed}}, {"series.csv", "metadata.json"});
  log << "simulate: " << preset_name(p) << " n=" << x.size() << " seed=" << seed << " -> " << dir.string() << '\n';
  return kExitOk;
}

int cmd_fit(const RunConfig& c, std::ostream& log) {
  const std::uint64_t seed = require_seed(c, "fit");
  if (!c.input) throw ConfigError("config field 'data.input' is required for fit (or pass --input)");
  SeriesFile sf;
  try {
    sf = read_series_csv_file(*c.input);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("data.input: ") + e.what());
  }
  std::optional<SpectralFn> truth;
  if (c.truth) truth = preset_truth(preset_field(*c.truth, "truth"));

  FitSettings settings = c.fit;
  settings.mcmc.seed = seed;
  try {
    settings.mcmc.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("mcmc: ") + e.what());
  }
  log << "fit: n=" << sf.series.size() << ", " << settings.mcmc.chains << " chain(s) x " << settings.mcmc.n_iter
      << " iterations\n";
  const auto fit = fit_series(sf.series, settings, truth);

  const auto dir = prepare_output(c);
  {
    auto f = open_out(dir / "trace.jsonl");
    write_trace_jsonl(f, fit.traces);
  }
  {
    auto f = open_out(dir / "draws.csv");
    write_draws_csv(f, fit.traces);
  }
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(f, fit.summary, fit.periodogram);
  }

  json chains = json::array();
  json chain_seeds = json::array();
  for (const auto& t : fit.traces) {
    std::vector<double> ks;
    for (const auto& s : t.states) ks.push_back(static_cast<double>(s.k));
    chains.push_back({{"chain", t.chain},
                      {"seed", t.seed},
                      {"retained", t.size()},
                      {"acceptance", rates_json(t.acceptance)},
                      {"burn_in_acceptance", rates_json(t.burn_acceptance)},
                      {"final_log_tau_step", t.final_log_tau_step},
                      {"mean_v_step", t.mean_v_step},
                      {"mean_z_step", t.mean_z_step},
                      {"numeric_rejections", t.numeric_rejections},
                      {"log_posterior", series_stats(t.log_posterior)},
                      {"k", series_stats(ks)},
                      {"seconds", t.seconds}});
    chain_seeds.push_back(t.seed);
  }
  json diag;
  diag["n"] = fit.series.size();
  diag["working_model"] = settings.working_model.describe();
  diag["delta"] = settings.delta;
  diag["bounds"] = {{"m", fit.bounds.m}, {"M_bound", fit.bounds.M_bound}, {"auto", !settings.bounds.has_value()}};
  diag["level"] = fit.summary.level;
  diag["draws"] = fit.summary.draws;
  diag["uniform_multiplier"] = fit.summary.uniform_multiplier;
  diag["chains"] = chains;
  diag["runtime_seconds"] = fit.seconds;
  if (truth) diag["truth"] = *c.truth;
  if (fit.summary.metrics) diag["metrics"] = metrics_json(*fit.summary.metrics);
  write_json(dir / "diagnostics.json", diag);
  write_manifest(dir, "fit", c, {{"master", seed}, {"chains", chain_seeds}},
                 {"trace.jsonl", "draws.csv", "summary.csv", "diagnostics.json"});
  log << "fit: " << fit.summary.draws << " draws in " << std::fixed << std::setprecision(1) << fit.seconds
      << " s -> " << dir.string() << '\n';
  log.unsetf(std::ios::fixed);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, const std::string& which, std::ostream& log) {
  const std::uint64_t seed = c.seed.value_or(kDefaultVerifySeed);
  const auto dir = prepare_output(c);
  VerifyOutcome out;
  {
    auto report = open_out(dir / "report.csv");
    if (which == "szego") out = verify_szego(c, report, log);
    else if (which == "lln") out = verify_lln(c, seed, report, log);
    else if (which == "h") out = verify_h(c, seed, report, log);
    else if (which == "contraction") out = verify_contraction(c, seed, report, log);
    else if (which == "props") out = verify_props(c, seed, report, log);
    else throw ConfigError("verify: unknown check '" + which + "' (szego, lln, h, contraction, props)");
  }
  json verdict = {{"check", which}, {"passed", out.passed}, {"seed", seed}, {"details", out.details}};
  write_json(dir / "verdict.json", verdict);
  write_manifest(dir, "verify " + which, c, {{"master", seed}}, {"report.csv", "verdict.json"});
  log << "verify " << which << ": " << (out.passed ? "PASS" : "FAIL") << '\n';
  return out.passed ? kExitOk : kExitVerifyFailed;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const InitializationError& e) {
    err << "error: initialization failed: " << e.what() << '\n';
    return kExitInit;
  } catch (const ChainNumericError& e) {
    err << "error: numeric failure at iteration " << e.iteration() << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    err << "error: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InsufficientSampleError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    // InvalidInput, ConfigError and SpecError.
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace bnpspec::cli
