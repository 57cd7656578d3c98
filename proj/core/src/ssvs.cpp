#include "semigp/ssvs.hpp"

#include <cmath>
#include <sstream>

namespace semigp::ssvs {

GGrid GGrid::make(int size, double hyper_g_a) {
  if (size < 10) throw SemigpError("g grid: need at least 10 nodes");
  if (hyper_g_a <= 2.0) throw SemigpError("g grid: hyper-g a must exceed 2");
  GGrid grid;
  grid.t_nodes.resize(size);
  grid.g_nodes.resize(size);
  const double b = hyper_g_a / 2.0 - 1.0;  // t ~ Be(1, b)
  for (int i = 0; i < size; ++i) {
    const double u = (i + 0.5) / size;
    // Be(1,b) quantile: t = 1 - (1-u)^(1/b)
    const double t = 1.0 - std::pow(1.0 - u, 1.0 / b);
    grid.t_nodes[i] = t;
    grid.g_nodes[i] = t / (1.0 - t);
  }
  return grid;
}

namespace {

Eigen::MatrixXd included_columns(const Dataset& data, const std::vector<int>& idx) {
  Eigen::MatrixXd x(data.n(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) x.col(c) = data.x.col(idx[c]);
  return x;
}

}  // namespace

Eigen::LLT<Eigen::MatrixXd> factor_spd(Eigen::MatrixXd m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-10 * m.trace() / static_cast<double>(m.rows());
  m.diagonal().array() += jitter;
  llt.compute(m);
  if (llt.info() == Eigen::Success) return llt;
  std::ostringstream os;
  const double dmax = m.diagonal().maxCoeff(), dmin = m.diagonal().minCoeff();
  os << what << ": matrix not positive definite after jitter (diag range ["
     << dmin << ", " << dmax << "])";
  throw SemigpError(os.str());
}

double update_precision(const Dataset& data, const SigmaOps& ops,
                        const InclusionVector& inclusion, const Eigen::VectorXd& beta,
                        double g, const SamplerConfig& cfg, RngStream& rng) {
  const int pg = inclusion.p_gamma();
  Eigen::VectorXd resid = data.y;
  double prior_quad = 0.0;
  if (pg > 0) {
    const Eigen::MatrixXd xg = included_columns(data, inclusion.included_indices());
    resid -= xg * beta;
    prior_quad = beta.dot(ops.inv_quadform(xg) * beta) / g;
  }
  const double shape = 0.5 * (data.n() + pg) + cfg.phi_prior_shape;
  const double rate = 0.5 * (ops.inv_quad(resid) + prior_quad) + cfg.phi_prior_rate;
  if (!(rate > 0)) throw SemigpError("precision update: nonpositive rate");
  return rng.gamma_rate(shape, rate);
}

double update_g(const SigmaOps& ops, const Dataset& data,
                const InclusionVector& inclusion, const Eigen::VectorXd& beta,
                double phi, const GGrid& grid, RngStream& rng, Diagnostics* diag) {
  const int pg = inclusion.p_gamma();
  double quad = 0.0;
  if (pg > 0) {
    const Eigen::MatrixXd xg = included_columns(data, inclusion.included_indices());
    quad = beta.dot(ops.inv_quadform(xg) * beta);
  }
  const int G = static_cast<int>(grid.g_nodes.size());
  std::vector<double> logw(G);
  for (int i = 0; i < G; ++i) {
    const double gi = grid.g_nodes[i];
    logw[i] = -0.5 * pg * std::log(gi) - 0.5 * phi * quad / gi;
  }
  int pick = rng.categorical_from_log(logw);
  if (pick < 0) {
    if (diag) diag->grid_fallbacks += 1;
    pick = 0;
    double best = logw[0];
    for (int i = 1; i < G; ++i)
      if (logw[i] > best) { best = logw[i]; pick = i; }
  }
  return grid.g_nodes[pick];
}

namespace {

// y' Sigma^-1 X (X' Sigma^-1 X)^-1 X' Sigma^-1 y for the included block.
// Returns false (collinear) if the block is not SPD even after jitter.
bool fit_quadratic(const Eigen::MatrixXd& m_full, const Eigen::VectorXd& s_full,
                   const std::vector<int>& idx, double* out) {
  const int q = static_cast<int>(idx.size());
  if (q == 0) {
    *out = 0.0;
    return true;
  }
  Eigen::MatrixXd m(q, q);
  Eigen::VectorXd s(q);
  for (int a = 0; a < q; ++a) {
    s[a] = s_full[idx[a]];
    for (int b = 0; b < q; ++b) m(a, b) = m_full(idx[a], idx[b]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    m.diagonal().array() += 1e-10 * m.trace() / q;
    llt.compute(m);
    if (llt.info() != Eigen::Success) return false;
  }
  *out = s.dot(llt.solve(s));
  return true;
}

}  // namespace

InclusionVector update_inclusion(const Dataset& data, const SigmaOps& ops,
                                 InclusionVector inclusion, double g, double phi,
                                 const SamplerConfig& cfg, RngStream& rng,
                                 Diagnostics* diag) {
  const int p = inclusion.p();
  const Eigen::Index n = data.n();
  const Eigen::MatrixXd m_full = ops.inv_quadform(data.x);
  const Eigen::VectorXd s_full = ops.inv_cross(data.x, data.y);
  const double log1pg = std::log1p(g);
  const double shrink = 0.5 * phi * g / (1.0 + g);
  const double lp1 = std::log(cfg.prior_inclusion);
  const double lp0 = std::log1p(-cfg.prior_inclusion);

  std::vector<char> bits(inclusion.bits());
  for (int j = 0; j < p; ++j) {
    double score[2];
    bool ok[2];
    for (int v = 0; v <= 1; ++v) {
      bits[j] = static_cast<char>(v);
      std::vector<int> idx;
      for (int c = 0; c < p; ++c)
        if (bits[c]) idx.push_back(c);
      const int pg = static_cast<int>(idx.size());
      if (pg >= n) {  // model space excludes dimensions >= n
        ok[v] = false;
        score[v] = -std::numeric_limits<double>::infinity();
        continue;
      }
      double quad = 0.0;
      ok[v] = fit_quadratic(m_full, s_full, idx, &quad);
      if (!ok[v]) {
        if (diag) diag->collinear_exclusions += 1;
        score[v] = -std::numeric_limits<double>::infinity();
        continue;
      }
      score[v] = (v ? lp1 : lp0) - 0.5 * pg * log1pg + shrink * quad;
    }
    if (!ok[0] && !ok[1])
      throw SemigpError("inclusion update: both configurations degenerate");
    double p1;
    if (!ok[1]) p1 = 0.0;
    else if (!ok[0]) p1 = 1.0;
    else p1 = 1.0 / (1.0 + std::exp(score[0] - score[1]));
    bits[j] = rng.bernoulli(p1) ? 1 : 0;
  }
  return InclusionVector::make(std::move(bits), n);
}

void beta_conditional_moments(const Dataset& data, const SigmaOps& ops,
                              const InclusionVector& inclusion,
                              const Eigen::VectorXd& subject_intercepts, double g,
                              double phi, Eigen::VectorXd* mean, Eigen::MatrixXd* cov) {
  const int pg = inclusion.p_gamma();
  if (pg == 0) {
    *mean = Eigen::VectorXd();
    *cov = Eigen::MatrixXd();
    return;
  }
  const Eigen::MatrixXd xg = included_columns(data, inclusion.included_indices());
  Eigen::MatrixXd vinv = (phi / g) * ops.inv_quadform(xg) + phi * SigmaOps::gram(xg);
  auto llt = factor_spd(std::move(vinv), "beta update V");
  const Eigen::VectorXd rhs = phi * (xg.transpose() * (data.y - subject_intercepts));
  *mean = llt.solve(rhs);
  *cov = llt.solve(Eigen::MatrixXd::Identity(pg, pg));
}

Eigen::VectorXd update_beta(const Dataset& data, const SigmaOps& ops,
                            const InclusionVector& inclusion,
                            const Eigen::VectorXd& subject_intercepts, double g,
                            double phi, RngStream& rng) {
  const int pg = inclusion.p_gamma();
  if (pg == 0) return Eigen::VectorXd();
  const Eigen::MatrixXd xg = included_columns(data, inclusion.included_indices());
  Eigen::MatrixXd vinv = (phi / g) * ops.inv_quadform(xg) + phi * SigmaOps::gram(xg);
  auto llt = factor_spd(std::move(vinv), "beta update V");
  const Eigen::VectorXd rhs = phi * (xg.transpose() * (data.y - subject_intercepts));
  const Eigen::VectorXd mean = llt.solve(rhs);
  Eigen::VectorXd z(pg);
  for (int c = 0; c < pg; ++c) z[c] = rng.normal();
  // sample = mean + L^-T z where V^-1 = L L'
  return mean + llt.matrixU().solve(z);
}

Eigen::VectorXd draw_beta_marginal(const Dataset& data, const SigmaOps& ops,
                                   const InclusionVector& inclusion, double g,
                                   double phi, RngStream& rng) {
  const int pg = inclusion.p_gamma();
  if (pg == 0) return Eigen::VectorXd();
  const Eigen::MatrixXd xg = included_columns(data, inclusion.included_indices());
  auto llt = factor_spd(ops.inv_quadform(xg), "marginal beta Q");
  const Eigen::VectorXd s = ops.inv_cross(xg, data.y);
  const double shrink = g / (1.0 + g);
  const Eigen::VectorXd mean = shrink * llt.solve(s);
  Eigen::VectorXd z(pg);
  for (int c = 0; c < pg; ++c) z[c] = rng.normal();
  const double scale = std::sqrt(shrink / phi);
  return mean + scale * llt.matrixU().solve(z);
}

}  // namespace semigp::ssvs
