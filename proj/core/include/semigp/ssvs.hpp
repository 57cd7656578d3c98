#ifndef SEMIGP_SSVS_HPP
#define SEMIGP_SSVS_HPP

#include <Eigen/Dense>

#include "semigp/rng.hpp"
#include "semigp/sigma_ops.hpp"
#include "semigp/types.hpp"

namespace semigp::ssvs {

// Fixed grid for the griddy Gibbs update of g. Nodes are equally spaced
// quantiles of the hyper-g prior on t = g/(1+g), i.e. Be(1, a/2-1), so each
// node carries equal prior mass and the categorical weights reduce to the
// likelihood factor.
struct GGrid {
  std::vector<double> t_nodes;
  std::vector<double> g_nodes;

  static GGrid make(int size, double hyper_g_a);
};

// Running diagnostics emitted by the updates (collinearity exclusions,
// degenerate grid normalizations).
struct Diagnostics {
  long collinear_exclusions = 0;
  long grid_fallbacks = 0;
};

// phi ~ Ga((n + p_gamma)/2 + a_phi,
//           1/2 [ (y - X b)' Sigma^-1 (y - X b) + b' (X' Sigma^-1 X) b / g ] + b_phi)
double update_precision(const Dataset& data, const SigmaOps& ops,
                        const InclusionVector& inclusion, const Eigen::VectorXd& beta,
                        double g, const SamplerConfig& cfg, RngStream& rng);

// Griddy Gibbs for g: node weights proportional to
//   exp( -(p_gamma/2) log g - (phi / 2g) beta' (X' Sigma^-1 X) beta )
// over the prior-quantile grid.
double update_g(const SigmaOps& ops, const Dataset& data,
                const InclusionVector& inclusion, const Eigen::VectorXd& beta,
                double phi, const GGrid& grid, RngStream& rng, Diagnostics* diag);

// One-at-a-time indicator updates with beta and the cluster intercepts
// integrated out:
//   score(v) = log prior(v) - (p_gamma(v)/2) log(1+g)
//              + (phi/2) (g/(1+g)) y' Sigma^-1 X (X' Sigma^-1 X)^-1 X' Sigma^-1 y
// The quadratic term enters with a positive sign: better fit raises the
// inclusion probability. Models with p_gamma >= n get probability zero.
InclusionVector update_inclusion(const Dataset& data, const SigmaOps& ops,
                                 InclusionVector inclusion, double g, double phi,
                                 const SamplerConfig& cfg, RngStream& rng,
                                 Diagnostics* diag);

// Coefficient draw conditional on the subject intercepts:
//   V = [ (phi/g) X' Sigma^-1 X + phi X' X ]^-1,  E = V phi X' (y - alpha)
// where alpha is the n-vector of per-subject intercepts.
Eigen::VectorXd update_beta(const Dataset& data, const SigmaOps& ops,
                            const InclusionVector& inclusion,
                            const Eigen::VectorXd& subject_intercepts, double g,
                            double phi, RngStream& rng);

// Coefficient draw with the cluster intercepts integrated out (the posterior
// implied by the whitened model):
//   beta ~ N( (g/(1+g)) Q^-1 X' Sigma^-1 y,  (g/(1+g)) (1/phi) Q^-1 ),
//   Q = X' Sigma^-1 X.
// Used inside the sweep to refresh the atoms from their coefficient-
// marginalized conditional by composition.
Eigen::VectorXd draw_beta_marginal(const Dataset& data, const SigmaOps& ops,
                                   const InclusionVector& inclusion, double g,
                                   double phi, RngStream& rng);

// Mean and covariance of update_beta's conditional (for tests and for the
// deterministic parts of prediction).
void beta_conditional_moments(const Dataset& data, const SigmaOps& ops,
                              const InclusionVector& inclusion,
                              const Eigen::VectorXd& subject_intercepts, double g,
                              double phi, Eigen::VectorXd* mean, Eigen::MatrixXd* cov);

// SPD solve with a relative jitter fallback of 1e-10 trace/q; throws with a
// condition diagnostic if the block stays non-positive-definite.
Eigen::LLT<Eigen::MatrixXd> factor_spd(Eigen::MatrixXd m, const char* what);

}  // namespace semigp::ssvs

#endif
