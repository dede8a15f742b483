#include "bnpspec/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bnpspec::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + field + "' has the wrong type");
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError("config field '" + field + "' must be a number");
  return j.get<double>();
}

std::size_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError("config field '" + field + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> get_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("config field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(get_number(v, field));
  return out;
}

void parse_working_model(const json& j, WorkingModelSpec& wm) {
  reject_unknown(j, {"kind", "coefficients", "sigma2", "acf"}, "working_model");
  if (j.contains("kind")) {
    const auto kind = get_as<std::string>(j["kind"], "working_model.kind");
    if (kind == "white_noise") wm.kind = WorkingModelSpec::Kind::white_noise;
    else if (kind == "ar") wm.kind = WorkingModelSpec::Kind::ar;
    else if (kind == "acf") wm.kind = WorkingModelSpec::Kind::acf;
    else throw ConfigError("working_model.kind must be white_noise, ar or acf");
  }
  if (j.contains("coefficients")) wm.ar = get_vector(j["coefficients"], "working_model.coefficients");
  if (j.contains("sigma2")) wm.sigma2 = get_number(j["sigma2"], "working_model.sigma2");
  if (j.contains("acf")) wm.acf = get_vector(j["acf"], "working_model.acf");
  if (wm.kind == WorkingModelSpec::Kind::ar && wm.ar.empty())
    throw ConfigError("working_model.coefficients is required for kind 'ar'");
  if (wm.kind == WorkingModelSpec::Kind::acf && wm.acf.empty())
    throw ConfigError("working_model.acf is required for kind 'acf'");
}

void parse_prior(const json& j, PriorHyper& h) {
  reject_unknown(j,
                 {"k_max", "k_ratio", "tau_prior", "tau_shape", "tau_rate", "tau_lo", "tau_hi",
                  "concentration", "truncation"},
                 "prior");
  if (j.contains("k_max")) h.k_max = get_count(j["k_max"], "prior.k_max");
  if (j.contains("k_ratio")) h.k_ratio = get_number(j["k_ratio"], "prior.k_ratio");
  if (j.contains("tau_prior")) {
    const auto fam = get_as<std::string>(j["tau_prior"], "prior.tau_prior");
    if (fam == "inverse_gamma") h.tau_family = PriorHyper::TauFamily::inverse_gamma;
    else if (fam == "log_uniform") h.tau_family = PriorHyper::TauFamily::log_uniform;
    else throw ConfigError("prior.tau_prior must be inverse_gamma or log_uniform");
  }
  if (j.contains("tau_shape")) h.tau_shape = get_number(j["tau_shape"], "prior.tau_shape");
  if (j.contains("tau_rate")) h.tau_rate = get_number(j["tau_rate"], "prior.tau_rate");
  if (j.contains("tau_lo")) h.tau_lo = get_number(j["tau_lo"], "prior.tau_lo");
  if (j.contains("tau_hi")) h.tau_hi = get_number(j["tau_hi"], "prior.tau_hi");
  if (j.contains("concentration")) h.concentration = get_number(j["concentration"], "prior.concentration");
  if (j.contains("truncation")) h.truncation = get_count(j["truncation"], "prior.truncation");
}

void parse_mcmc(const json& j, McmcConfig& m) {
  reject_unknown(j,
                 {"n_iter", "burn_in", "thin", "v_step", "z_step", "log_tau_step", "k_jump", "adapt",
                  "target_accept", "chains"},
                 "mcmc");
  if (j.contains("n_iter")) m.n_iter = get_count(j["n_iter"], "mcmc.n_iter");
  if (j.contains("burn_in")) m.burn_in = get_count(j["burn_in"], "mcmc.burn_in");
  if (j.contains("thin")) m.thin = get_count(j["thin"], "mcmc.thin");
  if (j.contains("v_step")) m.v_step = get_number(j["v_step"], "mcmc.v_step");
  if (j.contains("z_step")) m.z_step = get_number(j["z_step"], "mcmc.z_step");
  if (j.contains("log_tau_step")) m.log_tau_step = get_number(j["log_tau_step"], "mcmc.log_tau_step");
  if (j.contains("k_jump")) m.k_jump = get_count(j["k_jump"], "mcmc.k_jump");
  if (j.contains("adapt")) m.adapt = get_as<bool>(j["adapt"], "mcmc.adapt");
  if (j.contains("target_accept")) m.target_accept = get_number(j["target_accept"], "mcmc.target_accept");
  if (j.contains("chains")) m.chains = get_count(j["chains"], "mcmc.chains");
}

}  // namespace

RunConfig parse_config(const json& j) {
  reject_unknown(j,
                 {"seed", "data", "truth", "working_model", "delta", "bounds", "prior", "mcmc", "level",
                  "output", "verify"},
                 "");
  RunConfig c;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ConfigError("config field 'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("data")) {
    const auto& d = j["data"];
    reject_unknown(d, {"preset", "n", "input"}, "data");
    if (d.contains("preset")) c.preset = get_as<std::string>(d["preset"], "data.preset");
    if (d.contains("n")) c.n = get_count(d["n"], "data.n");
    if (d.contains("input")) c.input = get_as<std::string>(d["input"], "data.input");
  }
  if (j.contains("truth")) c.truth = get_as<std::string>(j["truth"], "truth");
  if (j.contains("working_model")) parse_working_model(j["working_model"], c.fit.working_model);
  if (j.contains("delta")) c.fit.delta = get_number(j["delta"], "delta");
  if (j.contains("bounds")) {
    const auto& b = j["bounds"];
    if (b.is_string()) {
      if (b.get<std::string>() != "auto") throw ConfigError("bounds must be \"auto\" or {m, M_bound}");
      c.fit.bounds.reset();
    } else {
      reject_unknown(b, {"m", "M_bound"}, "bounds");
      if (!b.contains("m") || !b.contains("M_bound")) throw ConfigError("bounds needs both m and M_bound");
      ThetaBounds tb{get_number(b["m"], "bounds.m"), get_number(b["M_bound"], "bounds.M_bound")};
      try {
        tb.validate();
      } catch (const InvalidInput& e) {
        throw ConfigError(std::string("bounds: ") + e.what());
      }
      c.fit.bounds = tb;
    }
  }
  if (j.contains("prior")) parse_prior(j["prior"], c.fit.hyper);
  if (j.contains("mcmc")) parse_mcmc(j["mcmc"], c.fit.mcmc);
  if (j.contains("level")) c.fit.level = get_number(j["level"], "level");
  if (j.contains("output")) c.output = get_as<std::string>(j["output"], "output");
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    reject_unknown(v, {"n", "replicates", "radius_fraction", "perturbations", "cases"}, "verify");
    if (v.contains("n")) {
      if (!v["n"].is_array()) throw ConfigError("verify.n must be an array of integers");
      for (const auto& x : v["n"]) c.verify_n.push_back(get_count(x, "verify.n"));
    }
    if (v.contains("replicates")) c.replicates = get_count(v["replicates"], "verify.replicates");
    if (v.contains("radius_fraction")) c.radius_fraction = get_number(v["radius_fraction"], "verify.radius_fraction");
    if (v.contains("perturbations")) c.perturbations = get_count(v["perturbations"], "verify.perturbations");
    if (v.contains("cases")) c.cases = get_count(v["cases"], "verify.cases");
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json RunConfig::to_json() const {
  json j;
  if (seed) j["seed"] = *seed;
  json data = json::object();
  if (preset) data["preset"] = *preset;
  if (n) data["n"] = *n;
  if (input) data["input"] = *input;
  j["data"] = data;
  if (truth) j["truth"] = *truth;
  const auto& wm = fit.working_model;
  json w;
  w["kind"] = wm.kind == WorkingModelSpec::Kind::white_noise ? "white_noise"
              : wm.kind == WorkingModelSpec::Kind::ar        ? "ar"
                                                             : "acf";
  if (wm.kind == WorkingModelSpec::Kind::ar) {
    w["coefficients"] = wm.ar;
    w["sigma2"] = wm.sigma2;
  }
  if (wm.kind == WorkingModelSpec::Kind::acf) w["acf"] = wm.acf;
  j["working_model"] = w;
  j["delta"] = fit.delta;
  if (fit.bounds) j["bounds"] = {{"m", fit.bounds->m}, {"M_bound", fit.bounds->M_bound}};
  else j["bounds"] = "auto";
  const auto& h = fit.hyper;
  j["prior"] = {{"k_max", h.k_max},
                {"k_ratio", h.k_ratio},
                {"tau_prior", h.tau_family == PriorHyper::TauFamily::inverse_gamma ? "inverse_gamma" : "log_uniform"},
                {"tau_shape", h.tau_shape},
                {"tau_rate", h.tau_rate},
                {"tau_lo", h.tau_lo},
                {"tau_hi", h.tau_hi},
                {"concentration", h.concentration},
                {"truncation", h.truncation}};
  const auto& m = fit.mcmc;
  j["mcmc"] = {{"n_iter", m.n_iter},     {"burn_in", m.burn_in},
               {"thin", m.thin},         {"v_step", m.v_step},
               {"z_step", m.z_step},     {"log_tau_step", m.log_tau_step},
               {"k_jump", m.k_jump},     {"adapt", m.adapt},
               {"target_accept", m.target_accept}, {"chains", m.chains}};
  j["level"] = fit.level;
  j["output"] = output;
  json v = {{"radius_fraction", radius_fraction}, {"perturbations", perturbations}, {"cases", cases}};
  if (!verify_n.empty()) v["n"] = verify_n;
  if (replicates) v["replicates"] = *replicates;
  j["verify"] = v;
  return j;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& field) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v <= 0) throw std::invalid_argument("bad");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError(field + ": '" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw ConfigError(field + " is empty");
  return out;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bnpspec::cli
