#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnpspec/likelihood.hpp"
#include "bnpspec/prior.hpp"
#include "bnpspec/rng.hpp"
#include "bnpspec/types.hpp"
#include "bnpspec/working_model.hpp"

namespace bnpspec {

struct McmcConfig {
  std::size_t n_iter = 30000;
  std::size_t burn_in = 10000;
  std::size_t thin = 5;
  // Initial random-walk scales; adapted on the log scale during burn-in.
  double v_step = 1.0;        // logit(V_l)
  double z_step = 0.1;        // Z_l, reflected at 0 and 1
  double log_tau_step = 0.3;  // ln tau
  std::size_t k_jump = 3;     // K -> K +- U{1..k_jump}
  bool adapt = true;
  double target_accept = 0.30;
  std::uint64_t seed = 0;
  std::size_t chains = 1;
  /// Replace the likelihood by 0 (prior-only runs).
  bool stub_likelihood = false;
  /// Keep phi at the Fourier ordinates for every retained draw.
  bool store_phi = true;

  /// Throws InvalidInput when an invariant fails.
  void validate() const;
};

enum class Block { v, z, tau, k };

struct BlockRates {
  double v = 0.0;
  double z = 0.0;
  double tau = 0.0;
  double k = 0.0;
};

/// Retained (post burn-in, thinned) draws of one chain.
struct McmcTrace {
  std::uint64_t seed = 0;
  std::size_t chain = 0;
  std::size_t n = 0;
  std::vector<std::size_t> iterations;
  std::vector<BdpState> states;
  std::vector<std::vector<double>> phi;  // phi at y_j, one row per draw (when stored)
  std::vector<double> log_posterior;
  std::vector<double> log_likelihood;
  BlockRates acceptance;      // post burn-in
  BlockRates burn_acceptance; // during burn-in
  double final_log_tau_step = 0.0;
  double mean_v_step = 0.0;
  double mean_z_step = 0.0;
  std::size_t numeric_rejections = 0;
  double seconds = 0.0;

  std::size_t size() const noexcept { return states.size(); }
};

/// Everything the target density depends on. Holds the likelihood and
/// working model by value; shareable across chains (read-only).
struct PosteriorProblem {
  PosteriorProblem(const TimeSeries& x, const WorkingModel& wm, PriorHyper hyper,
                   ThetaBounds bounds, double delta);

  TimeSeries x;
  WorkingModel wm;
  PriorHyper hyper;
  ThetaBounds bounds;
  double delta = 0.0;
  CorrectedWhittle likelihood;
};

/// Current state plus cached quantities for cheap MH ratios.
struct ChainState {
  BdpState state;
  std::vector<double> phi;  // ordinates (empty when not evaluated)
  double log_likelihood = 0.0;
  double log_prior = 0.0;
  double log_posterior() const noexcept { return log_likelihood + log_prior; }
};

/// Evaluates log-likelihood pieces for a chain; owns per-chain caches.
class TargetEvaluator {
 public:
  TargetEvaluator(const PosteriorProblem& problem, bool stub_likelihood);

  /// Log-likelihood of a state or -inf when outside Theta or on numeric
  /// failure. `phi_out` receives the ordinates when the state is evaluated.
  double log_likelihood(const BdpState& s, std::vector<double>& phi_out);
  /// Membership of a state (evaluates phi).
  Membership membership(const BdpState& s);
  bool needs_evaluation() const noexcept { return evaluate_; }
  std::size_t numeric_rejections() const noexcept { return numeric_rejections_; }

 private:
  const PosteriorProblem& problem_;
  bool stub_;
  bool evaluate_;
  BdpEvaluator bdp_;
  BdpEvaluator::Result scratch_;
  std::size_t numeric_rejections_ = 0;
};

/// Unnormalized log posterior: corrected log-likelihood + prior log density,
/// -inf outside Theta.
double log_target(const BdpState& state, const PosteriorProblem& problem);

/// Metropolis accept step: true with probability min(1, exp(log_ratio)).
/// Non-finite or NaN ratios reject.
bool mh_accept(double log_ratio, Rng& rng);

/// Random-walk scales for the continuous blocks.
struct ProposalScales {
  std::vector<double> v;  // per stick
  std::vector<double> z;  // per stick
  double log_tau = 0.3;
  std::size_t k_jump = 3;
};

/// Sweep one block. V and Z sweep their sticks one at a time in index order.
/// Returns the number of accepted proposals; `proposals` receives the count.
std::size_t mh_block_update(ChainState& cs, Block block, Rng& rng, const ProposalScales& scales,
                            const PosteriorProblem& problem, TargetEvaluator& eval,
                            std::vector<std::size_t>* accepted_per_index = nullptr,
                            std::size_t* proposals = nullptr);

/// Starting state: K from the ladder 20 (20 attempts), 10, 5, 2, 1 (20 each),
/// tau matched to the mean periodogram, sticks from the prior. Throws
/// InitializationError after 100 draws outside Theta.
BdpState initialize_state(const PosteriorProblem& problem, Rng& rng);

/// Runs one chain from `seed`. Deterministic given (problem, config, seed).
/// `progress`, when set, is called every 1000 iterations from the chain's thread.
McmcTrace run_chain(const PosteriorProblem& problem, const McmcConfig& config, std::uint64_t seed,
                    std::size_t chain_index = 0,
                    const std::function<void(std::size_t, std::size_t)>& progress = {});

/// config.chains chains with seeds sub_seed(config.seed, c), in parallel.
std::vector<McmcTrace> run_chains(const PosteriorProblem& problem, const McmcConfig& config);

/// Concatenated phi draws of all chains.
std::vector<std::vector<double>> pooled_phi(const std::vector<McmcTrace>& traces);

/// One JSON object per retained state.
void write_trace_jsonl(std::ostream& out, const std::vector<McmcTrace>& traces);
/// chain,iteration,phi_0..phi_N on the Fourier ordinates.
void write_draws_csv(std::ostream& out, const std::vector<McmcTrace>& traces);

}  // namespace bnpspec
