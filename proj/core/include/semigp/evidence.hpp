#ifndef SEMIGP_EVIDENCE_HPP
#define SEMIGP_EVIDENCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "semigp/sigma_ops.hpp"
#include "semigp/simulate.hpp"
#include "semigp/types.hpp"

namespace semigp::evidence {

// Hyper-g prior pi(g) = ((a-2)/2) (1+g)^{-a/2}, 2 < a <= 4; equivalently
// t = g/(1+g) ~ Be(1, a/2-1).
struct GPrior {
  double a = 4.0;
};

inline constexpr int kDefaultQuadNodes = 10000;
inline constexpr int kMaxExactN = 12;  // Bell(12) = 4,213,597 partitions

// log of  int (1+g)^{-p/2} [1 - t r2]^{-n/2} pi(dg),  t = g/(1+g),
// by the deterministic midpoint rule in t with `nodes` nodes, accumulated in
// log space. p == 0 returns 0 exactly. Throws for r2 at the divergence
// boundary (saturated model).
double log_g_integral(Eigen::Index n, int p, double r2, const GPrior& prior,
                      int nodes = kDefaultQuadNodes);

// Squared multiple correlation of the whitened response Z = Sigma^-1/2 y on
// the whitened design, computed through the structured quadratic forms.
double r2_tilde(const SigmaOps& ops, const InclusionVector& gamma, const Dataset& data);

// Conditional log marginal likelihood given the allocation, up to the
// model-independent constant shared by all models:
//   -(n/2) log(Z'Z) + log_g_integral(n, p_gamma, r2_tilde, prior)
double conditional_log_marginal(const SigmaOps& ops, const InclusionVector& gamma,
                                const Dataset& data, const GPrior& prior,
                                int nodes = kDefaultQuadNodes);

// One unordered set partition of {0..n-1} with its exchangeable partition
// probability under DP mass m:
//   log_weight = log G(m) - log G(m+n) + k log m + sum_j log G(n_j)
struct PartitionWeight {
  std::vector<std::int8_t> labels;  // canonical restricted-growth labels
  int k = 0;
  double log_weight = 0.0;

  std::vector<std::vector<int>> blocks() const;  // sorted block lists
};

// All set partitions with normalized weights (they sum to one). Refuses
// n > kMaxExactN; use the sampler for larger n.
std::vector<PartitionWeight> enumerate_partition_weights(int n, double m);

// Exact log marginal likelihood, marginalized over all allocations:
// log sum_partitions exp(log_weight + conditional_log_marginal). Same
// model-independent constant convention as conditional_log_marginal.
double exact_log_marginal(const Dataset& data, const InclusionVector& gamma,
                          double m, const GPrior& prior);

// log BF in favor of `numer` over `denom`, exact enumeration path.
double unconditional_log_bf(const Dataset& data, const InclusionVector& numer,
                            const InclusionVector& denom, double m, const GPrior& prior);

// Exact posterior probabilities over a list of models under a uniform model
// prior (oracle for the stochastic search sampler).
std::vector<double> exact_model_posterior(const Dataset& data,
                                          std::span<const InclusionVector> models,
                                          double m, const GPrior& prior);

// Evidence summary for a model pair on one dataset (exact path).
struct ExactEvidence {
  double log_marginal_1 = 0, log_marginal_2 = 0;  // unconditional
  double log_bf_21 = 0;                           // marginalized over allocations
  double log_bf_21_single_cluster = 0;            // conditional, A = 1_n
  double log_bf_21_identity = 0;                  // conditional, A = I_n
  double r2_model1_identity = 0, r2_model2_identity = 0;
};

ExactEvidence exact_evidence(const Dataset& data, const std::vector<int>& model1,
                             const std::vector<int>& model2, double m,
                             const GPrior& prior);

// Bayes-factor limit trajectories. Exact mode marginalizes allocations per
// replicate (n capped at kMaxExactN); conditional mode fixes the identity
// allocation, works for any n, and reports the whitened R^2 against its
// analytic limit b/(1/phi + b) with b = beta' beta / 6 for iid U(-1,1)
// covariates.
enum class TrajectoryMode { exact, conditional_identity };

struct TrajectoryRequest {
  TrajectoryMode mode = TrajectoryMode::exact;
  std::vector<int> n_grid;
  int replicates = 20;
  double m = 1.0;
  GPrior prior{};
  Eigen::VectorXd beta_true;
  sim::ResidualLaw residual;       // exact mode residual law
  double phi = 1.0;                // conditional mode model precision
  std::vector<int> model1, model2; // included predictor indices (model1 true)
};

struct TrajectoryPoint {
  int n = 0, replicate = 0;
  double log_bf = 0;  // log BF_21
  double r2_model1 = 0, r2_model2 = 0;
};

struct TrajectorySummary {
  int n = 0;
  double q25 = 0, median = 0, q75 = 0;
};

struct TrajectoryResult {
  std::vector<TrajectoryPoint> points;
  std::optional<double> r2_limit;  // conditional mode only
  std::vector<TrajectorySummary> summaries() const;
};

TrajectoryResult bf_trajectory(const TrajectoryRequest& req, std::uint64_t seed,
                               int threads = 1);

}  // namespace semigp::evidence

#endif
