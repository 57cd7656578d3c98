#ifndef SEMIGP_SUMMARY_HPP
#define SEMIGP_SUMMARY_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "semigp/chain.hpp"
#include "semigp/types.hpp"

namespace semigp {

// Empirical percentile with type-7 (linear) interpolation; prob in [0,1].
double percentile(std::vector<double> values, double prob);

// Sample autocorrelation at the given lag: mean-centered, biased
// normalization by N. A zero-variance series is defined to have
// autocorrelation 1 at every lag.
double autocorrelation(std::span<const double> series, int lag);

struct PosteriorSummary {
  std::vector<std::string> names;
  Eigen::VectorXd mip;
  Eigen::VectorXd beta_hat;  // model-averaged over zero-inclusive draws
  Eigen::VectorXd ci_low, ci_high;  // 2.5% / 97.5% empirical percentiles
  std::vector<char> median_probability_model;  // MIP > 0.5 per predictor
  std::vector<int> lags;                       // {1, 5, 10, 25, 50}
  Eigen::MatrixXd autocorr;                    // p x lags, of the beta series
  double phi_hat = 0, g_hat = 0, m_hat = 0;
  double intercept_hat = 0;

  bool operator==(const PosteriorSummary& o) const;
};

// Statistics over retained draws (post burn-in, thinned). Requires at least
// 100 draws. Model averaging keeps the zeros of excluded draws, so the
// averaged coefficient always lies inside its own credible interval; this is
// asserted.
PosteriorSummary summarize(const Draws& draws, const std::vector<std::string>& names);

}  // namespace semigp

#endif
