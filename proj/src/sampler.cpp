#include "bnpspec/sampler.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "json.hpp"

#include "bnpspec/errors.hpp"
#include "bnpspec/periodogram.hpp"

namespace bnpspec {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kMinLogStep = std::log(1e-4);
const double kMaxLogStep = std::log(50.0);

double reflect_unit(double z) {
  z = std::fmod(std::abs(z), 2.0);
  return z > 1.0 ? 2.0 - z : z;
}

double adapt_step(double step, double accepted, double target, std::size_t t) {
  const double gain = std::pow(static_cast<double>(t) + 1.0, -0.6);
  const double ls = std::clamp(std::log(step) + gain * (accepted - target), kMinLogStep, kMaxLogStep);
  return std::exp(ls);
}
}  // namespace

void McmcConfig::validate() const {
  if (n_iter == 0) throw InvalidInput("mcmc.n_iter must be positive");
  if (!(burn_in < n_iter)) throw InvalidInput("mcmc.burn_in must be smaller than mcmc.n_iter");
  if (thin < 1) throw InvalidInput("mcmc.thin must be >= 1");
  if (!(target_accept > 0.1 && target_accept < 0.9))
    throw InvalidInput("mcmc.target_accept must lie in (0.1, 0.9)");
  if (!(v_step > 0.0) || !(z_step > 0.0) || !(log_tau_step > 0.0))
    throw InvalidInput("mcmc proposal scales must be positive");
  if (k_jump < 1) throw InvalidInput("mcmc.k_jump must be >= 1");
  if (chains < 1) throw InvalidInput("mcmc.chains must be >= 1");
}

PosteriorProblem::PosteriorProblem(const TimeSeries& x_, const WorkingModel& wm_, PriorHyper hyper_,
                                   ThetaBounds bounds_, double delta_)
    : x(x_),
      wm(wm_.n() == x_.size() ? wm_ : wm_.at(x_.size())),
      hyper(hyper_),
      bounds(bounds_),
      delta(delta_),
      likelihood(x_, wm) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidInput("delta must lie in [0,1]");
  if (hyper.k_max < 1) throw InvalidInput("prior.k_max must be >= 1");
  if (!(hyper.k_ratio > 0.0 && hyper.k_ratio <= 1.0)) throw InvalidInput("prior.k_ratio must lie in (0,1]");
  if (!(hyper.concentration > 0.0)) throw InvalidInput("prior.concentration must be positive");
  if (hyper.truncation < 1) throw InvalidInput("prior.truncation must be >= 1");
  if (hyper.tau_family == PriorHyper::TauFamily::inverse_gamma &&
      !(hyper.tau_shape > 0.0 && hyper.tau_rate > 0.0))
    throw InvalidInput("prior tau shape and rate must be positive");
  if (hyper.tau_family == PriorHyper::TauFamily::log_uniform &&
      !(hyper.tau_lo > 0.0 && hyper.tau_lo < hyper.tau_hi))
    throw InvalidInput("prior tau log-uniform range must satisfy 0 < lo < hi");
}

TargetEvaluator::TargetEvaluator(const PosteriorProblem& problem, bool stub_likelihood)
    : problem_(problem),
      stub_(stub_likelihood),
      evaluate_(!stub_likelihood || problem.bounds.restricted()),
      bdp_(problem.wm, problem.delta) {}

double TargetEvaluator::log_likelihood(const BdpState& s, std::vector<double>& phi_out) {
  if (!evaluate_) return 0.0;
  if (!(s.tau > 0.0) || !std::isfinite(s.tau)) return kNegInf;
  bdp_.evaluate(s.weights(), s.tau, scratch_);
  const auto mem = theta_membership(scratch_.check_min, scratch_.lipschitz_bound, problem_.bounds);
  if (!mem.inside) return kNegInf;
  phi_out = scratch_.ordinates;
  if (stub_) return 0.0;
  const auto v = problem_.likelihood.try_evaluate(phi_out, problem_.bounds.m);
  if (!v) {
    ++numeric_rejections_;
    return kNegInf;
  }
  return *v;
}

Membership TargetEvaluator::membership(const BdpState& s) {
  bdp_.evaluate(s.weights(), s.tau, scratch_);
  return theta_membership(scratch_.check_min, scratch_.lipschitz_bound, problem_.bounds);
}

double log_target(const BdpState& state, const PosteriorProblem& problem) {
  TargetEvaluator ev(problem, false);
  std::vector<double> phi;
  const double ll = ev.log_likelihood(state, phi);
  if (ll == kNegInf) return kNegInf;
  return ll + prior_log_density(state, problem.hyper);
}

bool mh_accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio) || log_ratio == kNegInf) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

namespace {

// Proposes `cand`, accepts or rejects and updates `cs` in place.
bool try_move(ChainState& cs, BdpState& cand, double delta_log_prior, double log_jacobian, Rng& rng,
              TargetEvaluator& eval, std::vector<double>& phi_buf) {
  if (!std::isfinite(delta_log_prior)) {
    // Draw the uniform anyway so the stream does not depend on rejections.
    (void)uniform01(rng);
    return false;
  }
  const double ll = eval.log_likelihood(cand, phi_buf);
  const double ratio = ll - cs.log_likelihood + delta_log_prior + log_jacobian;
  bool ok;
  if (std::isnan(ratio) || ratio == kNegInf) {
    (void)uniform01(rng);
    ok = false;
  } else {
    ok = std::log(uniform01(rng)) < ratio;
  }
  if (ok) {
    std::swap(cs.state, cand);
    cs.log_likelihood = ll;
    cs.log_prior += delta_log_prior;
    if (eval.needs_evaluation()) std::swap(cs.phi, phi_buf);
  }
  return ok;
}

}  // namespace

std::size_t mh_block_update(ChainState& cs, Block block, Rng& rng, const ProposalScales& scales,
                            const PosteriorProblem& problem, TargetEvaluator& eval,
                            std::vector<std::size_t>* accepted_per_index, std::size_t* proposals) {
  std::vector<double> phi_buf;
  std::size_t accepted = 0;
  std::size_t tried = 0;
  BdpState cand = cs.state;
  const double m_conc = cs.state.sticks.concentration;

  switch (block) {
    case Block::v: {
      for (std::size_t l = 0; l < cs.state.sticks.truncation(); ++l) {
        const double v = cs.state.sticks.v[l];
        const double u = std::log(v) - std::log1p(-v);
        const double u_new = u + scales.v[l] * standard_normal(rng);
        const double v_new = 1.0 / (1.0 + std::exp(-u_new));
        cand.sticks.v[l] = v_new;
        double dprior = kNegInf;
        double jac = 0.0;
        if (v_new > 0.0 && v_new < 1.0) {
          dprior = (m_conc - 1.0) * (std::log1p(-v_new) - std::log1p(-v));
          // density of logit(V): p(V) V (1-V)
          jac = std::log(v_new) + std::log1p(-v_new) - std::log(v) - std::log1p(-v);
        }
        ++tried;
        if (try_move(cs, cand, dprior, jac, rng, eval, phi_buf)) {
          ++accepted;
          if (accepted_per_index) ++(*accepted_per_index)[l];
        }
        cand.sticks.v[l] = cs.state.sticks.v[l];
      }
      break;
    }
    case Block::z: {
      for (std::size_t l = 0; l < cs.state.sticks.truncation(); ++l) {
        const double z_new = reflect_unit(cs.state.sticks.z[l] + scales.z[l] * standard_normal(rng));
        cand.sticks.z[l] = z_new;
        ++tried;
        if (try_move(cs, cand, 0.0, 0.0, rng, eval, phi_buf)) {
          ++accepted;
          if (accepted_per_index) ++(*accepted_per_index)[l];
        }
        cand.sticks.z[l] = cs.state.sticks.z[l];
      }
      break;
    }
    case Block::tau: {
      const double tau = cs.state.tau;
      const double tau_new = std::exp(std::log(tau) + scales.log_tau * standard_normal(rng));
      cand.tau = tau_new;
      const double dprior = log_tau_prior(tau_new, problem.hyper) - log_tau_prior(tau, problem.hyper);
      const double jac = std::log(tau_new) - std::log(tau);
      ++tried;
      if (try_move(cs, cand, dprior, jac, rng, eval, phi_buf)) ++accepted;
      break;
    }
    case Block::k: {
      const auto jump = std::uniform_int_distribution<std::size_t>(1, scales.k_jump)(rng);
      const bool up = uniform01(rng) < 0.5;
      const std::size_t k = cs.state.k;
      ++tried;
      // Out-of-range proposals are rejected, which keeps the kernel symmetric.
      if (!up && jump >= k) {
        (void)uniform01(rng);
        break;
      }
      const std::size_t k_new = up ? k + jump : k - jump;
      if (k_new > problem.hyper.k_max) {
        (void)uniform01(rng);
        break;
      }
      cand.k = k_new;
      const double dprior = log_rho(k_new, problem.hyper) - log_rho(k, problem.hyper);
      if (try_move(cs, cand, dprior, 0.0, rng, eval, phi_buf)) ++accepted;
      break;
    }
  }
  if (proposals) *proposals = tried;
  return accepted;
}

BdpState initialize_state(const PosteriorProblem& problem, Rng& rng) {
  static constexpr std::size_t kLadder[] = {20, 10, 5, 2, 1};
  static constexpr std::size_t kPerRung[] = {20, 20, 20, 20, 20};

  const auto pgram = periodogram(problem.x);
  // tau so that tau * b * phi_par^delta matches the periodogram level (b has unit mass).
  const auto par = problem.wm.phi_par_ordinates();
  double tau0 = 0.0;
  for (std::size_t j = 0; j < pgram.size(); ++j)
    tau0 += pgram[j] / std::pow(par[j], problem.delta);
  tau0 /= static_cast<double>(pgram.size());
  if (!(tau0 > 0.0) || !std::isfinite(tau0)) tau0 = 1.0;

  TargetEvaluator eval(problem, false);
  std::vector<double> phi;
  Membership last;
  std::size_t attempts = 0;
  for (std::size_t rung = 0; rung < std::size(kLadder); ++rung) {
    const std::size_t k = std::min(kLadder[rung], problem.hyper.k_max);
    for (std::size_t a = 0; a < kPerRung[rung]; ++a, ++attempts) {
      BdpState s;
      s.k = k;
      s.tau = tau0;
      s.delta = problem.delta;
      s.sticks = stick_breaking_sample(rng, problem.hyper.truncation, problem.hyper.concentration);
      last = eval.membership(s);
      if (!last.inside) continue;
      const double ll = eval.log_likelihood(s, phi);
      if (std::isfinite(ll) && std::isfinite(prior_log_density(s, problem.hyper))) return s;
    }
  }
  std::ostringstream msg;
  msg << "no admissible starting state after " << attempts << " prior draws (last: "
      << last.describe() << ", m=" << problem.bounds.m << ", M_bound=" << problem.bounds.M_bound
      << "); lower bounds.m or raise bounds.M_bound";
  throw InitializationError(msg.str());
}

McmcTrace run_chain(const PosteriorProblem& problem, const McmcConfig& config, std::uint64_t seed,
                    std::size_t chain_index,
                    const std::function<void(std::size_t, std::size_t)>& progress) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);
  TargetEvaluator eval(problem, config.stub_likelihood);

  ChainState cs;
  cs.state = initialize_state(problem, rng);
  cs.log_likelihood = eval.log_likelihood(cs.state, cs.phi);
  cs.log_prior = prior_log_density(cs.state, problem.hyper);
  if (!std::isfinite(cs.log_posterior())) {
    throw InitializationError(
        "log-target is not finite at the initial state; check the input series and bounds");
  }

  const std::size_t L = problem.hyper.truncation;
  ProposalScales scales;
  scales.v.assign(L, config.v_step);
  scales.z.assign(L, config.z_step);
  scales.log_tau = config.log_tau_step;
  scales.k_jump = config.k_jump;

  McmcTrace tr;
  tr.seed = seed;
  tr.chain = chain_index;
  tr.n = problem.x.size();
  const std::size_t kept = (config.n_iter - config.burn_in + config.thin - 1) / config.thin;
  tr.iterations.reserve(kept);
  tr.states.reserve(kept);
  tr.log_posterior.reserve(kept);
  tr.log_likelihood.reserve(kept);
  if (config.store_phi && eval.needs_evaluation()) tr.phi.reserve(kept);

  std::array<double, 4> acc_post{}, acc_burn{}, n_post{}, n_burn{};
  std::vector<std::size_t> acc_idx(L);
  std::size_t proposals = 0;

  for (std::size_t it = 0; it < config.n_iter; ++it) {
    const bool burning = it < config.burn_in;
    auto& acc = burning ? acc_burn : acc_post;
    auto& cnt = burning ? n_burn : n_post;
    const bool adapt = burning && config.adapt;

    // V and Z: per-stick acceptance drives per-stick scales.
    for (int b = 0; b < 2; ++b) {
      std::fill(acc_idx.begin(), acc_idx.end(), 0);
      const Block block = b == 0 ? Block::v : Block::z;
      const auto a = mh_block_update(cs, block, rng, scales, problem, eval, &acc_idx, &proposals);
      acc[b] += static_cast<double>(a);
      cnt[b] += static_cast<double>(proposals);
      if (adapt) {
        auto& sv = b == 0 ? scales.v : scales.z;
        for (std::size_t l = 0; l < L; ++l)
          sv[l] = adapt_step(sv[l], static_cast<double>(acc_idx[l]), config.target_accept, it);
        if (b == 1) {
          for (double& s : scales.z) s = std::min(s, 1.0);
        }
      }
    }
    {
      const auto a = mh_block_update(cs, Block::tau, rng, scales, problem, eval, nullptr, &proposals);
      acc[2] += static_cast<double>(a);
      cnt[2] += static_cast<double>(proposals);
      if (adapt) scales.log_tau = adapt_step(scales.log_tau, static_cast<double>(a), config.target_accept, it);
    }
    {
      const auto a = mh_block_update(cs, Block::k, rng, scales, problem, eval, nullptr, &proposals);
      acc[3] += static_cast<double>(a);
      cnt[3] += static_cast<double>(proposals);
    }

    const double lp = cs.log_posterior();
    if (!std::isfinite(lp)) {
      throw ChainNumericError("log-target became non-finite at iteration " + std::to_string(it), it);
    }
    if (!burning && (it - config.burn_in) % config.thin == 0) {
      tr.iterations.push_back(it);
      tr.states.push_back(cs.state);
      tr.log_posterior.push_back(lp);
      tr.log_likelihood.push_back(cs.log_likelihood);
      if (config.store_phi && eval.needs_evaluation()) tr.phi.push_back(cs.phi);
    }
    if (progress && (it + 1) % 1000 == 0) progress(it + 1, config.n_iter);
  }

  auto rate = [](double a, double n) { return n > 0.0 ? a / n : 0.0; };
  tr.acceptance = {rate(acc_post[0], n_post[0]), rate(acc_post[1], n_post[1]),
                   rate(acc_post[2], n_post[2]), rate(acc_post[3], n_post[3])};
  tr.burn_acceptance = {rate(acc_burn[0], n_burn[0]), rate(acc_burn[1], n_burn[1]),
                        rate(acc_burn[2], n_burn[2]), rate(acc_burn[3], n_burn[3])};
  tr.final_log_tau_step = scales.log_tau;
  tr.mean_v_step = std::accumulate(scales.v.begin(), scales.v.end(), 0.0) / static_cast<double>(L);
  tr.mean_z_step = std::accumulate(scales.z.begin(), scales.z.end(), 0.0) / static_cast<double>(L);
  tr.numeric_rejections = eval.numeric_rejections();
  tr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return tr;
}

std::vector<McmcTrace> run_chains(const PosteriorProblem& problem, const McmcConfig& config) {
  config.validate();
  const auto chains = static_cast<std::ptrdiff_t>(config.chains);
  std::vector<McmcTrace> out(config.chains);
  std::vector<std::exception_ptr> errors(config.chains);
#pragma omp parallel for schedule(dynamic, 1) if (chains > 1)
  for (std::ptrdiff_t c = 0; c < chains; ++c) {
    try {
      const auto idx = static_cast<std::size_t>(c);
      out[idx] = run_chain(problem, config, sub_seed(config.seed, idx), idx);
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<std::vector<double>> pooled_phi(const std::vector<McmcTrace>& traces) {
  std::vector<std::vector<double>> out;
  for (const auto& t : traces) out.insert(out.end(), t.phi.begin(), t.phi.end());
  return out;
}

void write_trace_jsonl(std::ostream& out, const std::vector<McmcTrace>& traces) {
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& s = t.states[i];
      nlohmann::json j;
      j["chain"] = t.chain;
      j["iteration"] = t.iterations[i];
      j["k"] = s.k;
      j["tau"] = s.tau;
      j["delta"] = s.delta;
      j["log_posterior"] = t.log_posterior[i];
      j["log_likelihood"] = t.log_likelihood[i];
      j["weights"] = s.weights().w;
      j["v"] = s.sticks.v;
      j["z"] = s.sticks.z;
      out << j.dump() << '\n';
    }
  }
}

void write_draws_csv(std::ostream& out, const std::vector<McmcTrace>& traces) {
  std::size_t cols = 0;
  for (const auto& t : traces)
    if (!t.phi.empty()) cols = t.phi.front().size();
  out << "chain,iteration";
  for (std::size_t j = 0; j < cols; ++j) out << ",phi_" << j;
  out << '\n';
  out.precision(17);
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.phi.size(); ++i) {
      out << t.chain << ',' << t.iterations[i];
      for (double v : t.phi[i]) out << ',' << v;
      out << '\n';
    }
  }
}

}  // namespace bnpspec
