#include "semigp/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace semigp {

double percentile(std::vector<double> values, double prob) {
  if (values.empty()) throw SemigpError("percentile: empty sample");
  if (prob < 0 || prob > 1) throw SemigpError("percentile: prob outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double f = h - static_cast<double>(lo);
  return values[lo] + f * (values[lo + 1] - values[lo]);
}

double autocorrelation(std::span<const double> series, int lag) {
  const std::size_t n = series.size();
  if (lag < 0) throw SemigpError("autocorrelation: negative lag");
  if (n <= static_cast<std::size_t>(lag))
    throw SemigpError("autocorrelation: series no longer than lag");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  if (c0 == 0.0) return 1.0;  // degenerate series
  double cl = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t)
    cl += (series[t] - mean) * (series[t + lag] - mean);
  return cl / c0;
}

bool PosteriorSummary::operator==(const PosteriorSummary& o) const {
  auto veq = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && a == b;
  };
  return names == o.names && veq(mip, o.mip) && veq(beta_hat, o.beta_hat) &&
         veq(ci_low, o.ci_low) && veq(ci_high, o.ci_high) &&
         median_probability_model == o.median_probability_model && lags == o.lags &&
         autocorr.rows() == o.autocorr.rows() && autocorr.cols() == o.autocorr.cols() &&
         autocorr == o.autocorr && phi_hat == o.phi_hat && g_hat == o.g_hat &&
         m_hat == o.m_hat && intercept_hat == o.intercept_hat;
}

PosteriorSummary summarize(const Draws& draws, const std::vector<std::string>& names) {
  const long nd = draws.size();
  if (nd < 100) throw SemigpError("summarize: need at least 100 retained draws");
  const int p = draws.p;
  if (static_cast<int>(names.size()) != p)
    throw SemigpError("summarize: name count mismatch");

  PosteriorSummary s;
  s.names = names;
  s.lags = {1, 5, 10, 25, 50};
  s.mip.resize(p);
  s.beta_hat.resize(p);
  s.ci_low.resize(p);
  s.ci_high.resize(p);
  s.median_probability_model.resize(p);
  s.autocorr.resize(p, static_cast<Eigen::Index>(s.lags.size()));

  std::vector<double> col(nd);
  for (int j = 0; j < p; ++j) {
    long inc = 0;
    for (long d = 0; d < nd; ++d) {
      col[d] = draws.beta(d, j);
      if (draws.gamma_at(d, j)) ++inc;
    }
    s.mip[j] = static_cast<double>(inc) / static_cast<double>(nd);
    s.beta_hat[j] = std::accumulate(col.begin(), col.end(), 0.0) / nd;
    s.ci_low[j] = percentile(col, 0.025);
    s.ci_high[j] = percentile(col, 0.975);
    s.median_probability_model[j] = s.mip[j] > 0.5 ? 1 : 0;
    for (std::size_t l = 0; l < s.lags.size(); ++l) {
      s.autocorr(j, static_cast<Eigen::Index>(l)) =
          s.lags[l] < nd ? autocorrelation(col, s.lags[l]) : 1.0;
    }
    if (!(s.ci_low[j] <= s.beta_hat[j] && s.beta_hat[j] <= s.ci_high[j]))
      throw SemigpError("summarize: model-averaged coefficient escaped its interval");
  }

  s.phi_hat = std::accumulate(draws.phi.begin(), draws.phi.end(), 0.0) / nd;
  s.g_hat = std::accumulate(draws.g.begin(), draws.g.end(), 0.0) / nd;
  s.m_hat = std::accumulate(draws.m.begin(), draws.m.end(), 0.0) / nd;
  s.intercept_hat =
      std::accumulate(draws.intercept.begin(), draws.intercept.end(), 0.0) / nd;
  return s;
}

}  // namespace semigp
