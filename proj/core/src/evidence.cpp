#include "semigp/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "semigp/parallel.hpp"
#include "semigp/summary.hpp"

namespace semigp::evidence {

namespace {

constexpr double kSaturation = 1.0 - 1e-12;

void check_r2(double r2) {
  if (r2 >= kSaturation)
    throw SemigpError("evidence: whitened R^2 at the divergence boundary (saturated model)");
}

}  // namespace

double log_g_integral(Eigen::Index n, int p, double r2, const GPrior& prior, int nodes) {
  if (prior.a <= 2.0) throw SemigpError("evidence: hyper-g a must exceed 2");
  if (nodes < 10) throw SemigpError("evidence: need at least 10 quadrature nodes");
  if (p == 0) return 0.0;  // integrand reduces to the prior density
  if (r2 < 0.0) r2 = 0.0;
  check_r2(r2);
  // density of t = g/(1+g): ((a-2)/2) (1-t)^(a/2 - 2)
  const double log_c = std::log(0.5 * (prior.a - 2.0));
  const double pow1mt = 0.5 * (prior.a - 4.0) + 0.5 * p;
  const double half_n = 0.5 * static_cast<double>(n);
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double t = (i + 0.5) / nodes;
    terms[i] = pow1mt * std::log1p(-t) - half_n * std::log1p(-r2 * t);
    mx = std::max(mx, terms[i]);
  }
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) sum += std::exp(terms[i] - mx);
  return log_c + mx + std::log(sum) - std::log(static_cast<double>(nodes));
}

double r2_tilde(const SigmaOps& ops, const InclusionVector& gamma, const Dataset& data) {
  if (gamma.p_gamma() < 1) throw SemigpError("r2_tilde: model must include a predictor");
  const auto idx = gamma.included_indices();
  Eigen::MatrixXd xg(data.n(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) xg.col(c) = data.x.col(idx[c]);
  const double zz = ops.inv_quad(data.y);
  if (!(zz > 0)) throw SemigpError("r2_tilde: degenerate response");
  const Eigen::VectorXd s = ops.inv_cross(xg, data.y);
  auto llt = ssvs::factor_spd(ops.inv_quadform(xg), "r2_tilde design");
  const double quad = s.dot(llt.solve(s));
  return std::clamp(quad / zz, 0.0, 1.0);
}

double conditional_log_marginal(const SigmaOps& ops, const InclusionVector& gamma,
                                const Dataset& data, const GPrior& prior, int nodes) {
  const double zz = ops.inv_quad(data.y);
  if (!(zz > 0)) throw SemigpError("evidence: degenerate response");
  const double base = -0.5 * static_cast<double>(data.n()) * std::log(zz);
  if (gamma.p_gamma() == 0) return base;
  const double r2 = r2_tilde(ops, gamma, data);
  check_r2(r2);
  return base + log_g_integral(data.n(), gamma.p_gamma(), r2, prior, nodes);
}

// ---------------------------------------------------------------------------
// Interpolated g-integral for the enumeration path.
//
// For fixed (n, p, prior) the quadrature value is a smooth function of r2;
// it is tabulated against s = -log(1 - r2) and evaluated by cubic
// interpolation, so marginalizing over millions of partitions does not pay
// the full quadrature per partition. Accuracy against the direct rule is
// checked in the test suite.
// ---------------------------------------------------------------------------

namespace {

class LogGIntegralTable {
 public:
  LogGIntegralTable(Eigen::Index n, int p, const GPrior& prior, int nodes)
      : p_(p) {
    if (p == 0) return;
    vals_.resize(kSize);
    for (int i = 0; i < kSize; ++i) {
      const double s = i * kSmax / (kSize - 1);
      const double r2 = -std::expm1(-s);
      vals_[i] = log_g_integral(n, p, r2, prior, nodes);
    }
  }

  double eval(double r2) const {
    if (p_ == 0) return 0.0;
    if (r2 < 0.0) r2 = 0.0;
    check_r2(r2);
    const double s = -std::log1p(-r2);
    const double ds = kSmax / (kSize - 1);
    double pos = s / ds;
    if (pos >= kSize - 1) {  // linear tail from the last two points
      const double slope = (vals_[kSize - 1] - vals_[kSize - 2]) / ds;
      return vals_[kSize - 1] + slope * (s - kSmax);
    }
    const int i1 = static_cast<int>(pos);
    const double f = pos - i1;
    const int i0 = std::max(i1 - 1, 0);
    const int i2 = std::min(i1 + 1, kSize - 1);
    const int i3 = std::min(i1 + 2, kSize - 1);
    // Catmull-Rom
    const double a0 = vals_[i0], a1 = vals_[i1], a2 = vals_[i2], a3 = vals_[i3];
    return a1 + 0.5 * f * (a2 - a0 + f * (2.0 * a0 - 5.0 * a1 + 4.0 * a2 - a3 +
                                          f * (3.0 * (a1 - a2) + a3 - a0)));
  }

 private:
  // domain ends just inside the saturation guard; the short stretch up to
  // the guard itself is covered by the linear tail
  static constexpr int kSize = 2048;
  static constexpr double kSmax = 27.0;
  int p_ = 0;
  std::vector<double> vals_;
};

std::shared_ptr<const LogGIntegralTable> get_table(Eigen::Index n, int p,
                                                   const GPrior& prior, int nodes) {
  struct Key {
    long n;
    int p, nodes;
    double a;
    bool operator<(const Key& o) const {
      return std::tie(n, p, nodes, a) < std::tie(o.n, o.p, o.nodes, o.a);
    }
  };
  static std::map<Key, std::shared_ptr<const LogGIntegralTable>> cache;
  static std::mutex mu;
  const Key key{static_cast<long>(n), p, nodes, prior.a};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const LogGIntegralTable>(n, p, prior, nodes);
  cache.emplace(key, table);
  return table;
}

// Cholesky solve of a small SPD system on stack buffers; returns s' M^-1 s.
bool small_quad_solve(double* m, double* s, int q, double* out) {
  // in-place lower Cholesky, row-major
  for (int j = 0; j < q; ++j) {
    double d = m[j * q + j];
    for (int k = 0; k < j; ++k) d -= m[j * q + k] * m[j * q + k];
    if (!(d > 0)) return false;
    const double l = std::sqrt(d);
    m[j * q + j] = l;
    for (int i = j + 1; i < q; ++i) {
      double v = m[i * q + j];
      for (int k = 0; k < j; ++k) v -= m[i * q + k] * m[j * q + k];
      m[i * q + j] = v / l;
    }
  }
  // forward solve L w = s, accumulate w'w
  double quad = 0.0;
  for (int i = 0; i < q; ++i) {
    double v = s[i];
    for (int k = 0; k < i; ++k) v -= m[i * q + k] * s[k];
    s[i] = v / m[i * q + i];
    quad += s[i] * s[i];
  }
  *out = quad;
  return true;
}

// Online log-sum-exp accumulator with a fixed visit order.
struct LogSumAcc {
  double mx = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  void add(double l) {
    if (l <= mx) {
      sum += std::exp(l - mx);
    } else {
      sum = sum * std::exp(mx - l) + 1.0;
      mx = l;
    }
  }
  double value() const { return mx + std::log(sum); }
};

// Enumerates set partitions of {0..n-1} in canonical order, carrying cluster
// sums of y and the union design columns, and accumulates
// log sum_A exp(log w_A + conditional log marginal) per model.
class PartitionEngine {
 public:
  PartitionEngine(const Dataset& data, std::span<const InclusionVector> models,
                  double m, const GPrior& prior, int nodes)
      : n_(static_cast<int>(data.n())), y_(data.y), half_n_(0.5 * n_) {
    if (n_ > kMaxExactN)
      throw SemigpError("evidence: exact enumeration supports n <= 12; use the sampler");
    if (!(m > 0)) throw SemigpError("evidence: DP mass must be positive");

    // union of included columns across models
    std::vector<int> union_cols;
    for (const auto& mod : models)
      for (int j : mod.included_indices())
        if (std::find(union_cols.begin(), union_cols.end(), j) == union_cols.end())
          union_cols.push_back(j);
    std::sort(union_cols.begin(), union_cols.end());
    C_ = static_cast<int>(union_cols.size());

    if (C_ > 2 * kMaxExactN)
      throw SemigpError("evidence: too many distinct predictors across models for the exact path");

    xu_.resize(n_ * std::max(C_, 1));
    for (int i = 0; i < n_; ++i)
      for (int c = 0; c < C_; ++c) xu_[i * C_ + c] = data.x(i, union_cols[c]);

    yty_ = y_.squaredNorm();
    xty_.assign(C_, 0.0);
    xtx_.assign(C_ * C_, 0.0);
    for (int i = 0; i < n_; ++i) {
      for (int c = 0; c < C_; ++c) {
        xty_[c] += xu_[i * C_ + c] * y_[i];
        for (int d = 0; d <= c; ++d) xtx_[c * C_ + d] += xu_[i * C_ + c] * xu_[i * C_ + d];
      }
    }
    for (int c = 0; c < C_; ++c)
      for (int d = c + 1; d < C_; ++d) xtx_[c * C_ + d] = xtx_[d * C_ + c];

    for (const auto& mod : models) {
      std::vector<int> pos;
      for (int j : mod.included_indices())
        pos.push_back(static_cast<int>(
            std::find(union_cols.begin(), union_cols.end(), j) - union_cols.begin()));
      model_cols_.push_back(std::move(pos));
      model_p_.push_back(mod.p_gamma());
      tables_.push_back(get_table(n_, mod.p_gamma(), prior, nodes));
    }
    acc_.resize(models.size());

    log_m_ = std::log(m);
    lg_const_ = std::lgamma(m) - std::lgamma(m + n_);
    for (int s = 1; s <= n_; ++s) {
      logtab_[s] = std::log(static_cast<double>(s));
      dtab_[s] = 1.0 / (1.0 + s);
    }
    sizes_.fill(0);
    ysum_.fill(0.0);
    xsum_.assign(static_cast<std::size_t>(n_) * std::max(C_, 1), 0.0);
  }

  std::vector<double> run() {
    recurse(0);
    std::vector<double> out(acc_.size());
    for (std::size_t i = 0; i < acc_.size(); ++i) out[i] = acc_[i].value();
    return out;
  }

 private:
  void recurse(int i) {
    if (i == n_) {
      leaf();
      return;
    }
    const double yi = y_[i];
    const double* xi = &xu_[i * C_];
    const int kmax = k_;
    double saved_x[2 * kMaxExactN];
    for (int j = 0; j <= kmax; ++j) {
      const bool fresh = (j == kmax);
      if (fresh) {
        sizes_[j] = 0;
        ysum_[j] = 0.0;
        std::fill_n(&xsum_[j * C_], C_, 0.0);
        ++k_;
      }
      const double saved_lg = sum_loggamma_;
      const double saved_y = ysum_[j];
      for (int c = 0; c < C_; ++c) saved_x[c] = xsum_[j * C_ + c];
      if (sizes_[j] >= 1) sum_loggamma_ += logtab_[sizes_[j]];
      sizes_[j] += 1;
      ysum_[j] += yi;
      for (int c = 0; c < C_; ++c) xsum_[j * C_ + c] += xi[c];

      recurse(i + 1);

      sizes_[j] -= 1;
      ysum_[j] = saved_y;
      for (int c = 0; c < C_; ++c) xsum_[j * C_ + c] = saved_x[c];
      sum_loggamma_ = saved_lg;
      if (fresh) --k_;
    }
  }

  void leaf() {
    const double logw = lg_const_ + k_ * log_m_ + sum_loggamma_;
    double zz = yty_;
    double s[kMaxExactN], mu[kMaxExactN * kMaxExactN];
    double su[2 * kMaxExactN];
    for (int c = 0; c < C_; ++c) su[c] = xty_[c];
    double muu[4 * kMaxExactN * kMaxExactN];
    for (int c = 0; c < C_; ++c)
      for (int d = 0; d <= c; ++d) muu[c * C_ + d] = xtx_[c * C_ + d];
    for (int j = 0; j < k_; ++j) {
      const double dj = dtab_[sizes_[j]];
      const double* xs = &xsum_[j * C_];
      zz -= dj * ysum_[j] * ysum_[j];
      for (int c = 0; c < C_; ++c) {
        su[c] -= dj * xs[c] * ysum_[j];
        for (int d = 0; d <= c; ++d) muu[c * C_ + d] -= dj * xs[c] * xs[d];
      }
    }
    const double base = -half_n_ * std::log(zz);
    for (std::size_t mi = 0; mi < model_cols_.size(); ++mi) {
      const int q = model_p_[mi];
      double cl = base;
      if (q > 0) {
        const auto& cols = model_cols_[mi];
        for (int a = 0; a < q; ++a) {
          s[a] = su[cols[a]];
          for (int b = 0; b <= a; ++b) {
            const double v = muu[std::max(cols[a], cols[b]) * C_ +
                                 std::min(cols[a], cols[b])];
            mu[a * q + b] = v;
            mu[b * q + a] = v;
          }
        }
        double quad = 0.0;
        if (!small_quad_solve(mu, s, q, &quad)) {
          // jitter once, mirroring the dense path
          for (int a = 0; a < q; ++a) {
            s[a] = su[cols[a]];
            for (int b = 0; b <= a; ++b) {
              const double v = muu[std::max(cols[a], cols[b]) * C_ +
                                   std::min(cols[a], cols[b])];
              mu[a * q + b] = v;
              mu[b * q + a] = v;
            }
          }
          double tr = 0.0;
          for (int a = 0; a < q; ++a) tr += mu[a * q + a];
          for (int a = 0; a < q; ++a) mu[a * q + a] += 1e-10 * tr / q;
          if (!small_quad_solve(mu, s, q, &quad))
            throw SemigpError("evidence: singular transformed design in enumeration");
        }
        const double r2 = std::clamp(quad / zz, 0.0, 1.0);
        cl += tables_[mi]->eval(r2);
      }
      acc_[mi].add(logw + cl);
    }
  }

  int n_, C_ = 0;
  const Eigen::VectorXd& y_;
  double half_n_;
  std::vector<double> xu_, xty_, xtx_;
  double yty_ = 0.0, log_m_ = 0.0, lg_const_ = 0.0;
  std::vector<std::vector<int>> model_cols_;
  std::vector<int> model_p_;
  std::vector<std::shared_ptr<const LogGIntegralTable>> tables_;
  std::vector<LogSumAcc> acc_;

  int k_ = 0;
  std::array<int, kMaxExactN + 1> sizes_{};
  std::array<double, kMaxExactN + 1> ysum_{};
  std::vector<double> xsum_;
  double sum_loggamma_ = 0.0;
  std::array<double, kMaxExactN + 1> logtab_{};
  std::array<double, kMaxExactN + 1> dtab_{};
};

std::vector<double> exact_log_marginals(const Dataset& data,
                                        std::span<const InclusionVector> models,
                                        double m, const GPrior& prior) {
  PartitionEngine engine(data, models, m, prior, kDefaultQuadNodes);
  return engine.run();
}

}  // namespace

std::vector<std::vector<int>> PartitionWeight::blocks() const {
  std::vector<std::vector<int>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i)
    out[labels[i]].push_back(static_cast<int>(i) + 1);
  return out;
}

std::vector<PartitionWeight> enumerate_partition_weights(int n, double m) {
  if (n < 1) throw SemigpError("partitions: n must be positive");
  if (n > kMaxExactN)
    throw SemigpError("partitions: enumeration supports n <= 12; use the sampler");
  if (!(m > 0)) throw SemigpError("partitions: DP mass must be positive");

  const double lg_const = std::lgamma(m) - std::lgamma(m + n);
  const double log_m = std::log(m);
  std::vector<PartitionWeight> out;
  std::vector<std::int8_t> labels(n, 0);
  std::vector<int> sizes(n, 0);

  auto weight = [&](int k) {
    double lw = lg_const + k * log_m;
    for (int j = 0; j < k; ++j) lw += std::lgamma(static_cast<double>(sizes[j]));
    return lw;
  };
  // canonical (restricted growth) recursion
  auto rec = [&](auto&& self, int i, int k) -> void {
    if (i == n) {
      out.push_back(PartitionWeight{labels, k, weight(k)});
      return;
    }
    for (int j = 0; j <= k; ++j) {
      labels[i] = static_cast<std::int8_t>(j);
      sizes[j] += 1;
      self(self, i + 1, j == k ? k + 1 : k);
      sizes[j] -= 1;
    }
  };
  rec(rec, 0, 0);
  return out;
}

double exact_log_marginal(const Dataset& data, const InclusionVector& gamma,
                          double m, const GPrior& prior) {
  const InclusionVector models[1] = {gamma};
  return exact_log_marginals(data, models, m, prior)[0];
}

double unconditional_log_bf(const Dataset& data, const InclusionVector& numer,
                            const InclusionVector& denom, double m,
                            const GPrior& prior) {
  const InclusionVector models[2] = {numer, denom};
  const auto lm = exact_log_marginals(data, models, m, prior);
  return lm[0] - lm[1];
}

std::vector<double> exact_model_posterior(const Dataset& data,
                                          std::span<const InclusionVector> models,
                                          double m, const GPrior& prior) {
  const auto lm = exact_log_marginals(data, models, m, prior);
  const double mx = *std::max_element(lm.begin(), lm.end());
  double total = 0.0;
  std::vector<double> post(lm.size());
  for (std::size_t i = 0; i < lm.size(); ++i) {
    post[i] = std::exp(lm[i] - mx);
    total += post[i];
  }
  for (double& v : post) v /= total;
  return post;
}

ExactEvidence exact_evidence(const Dataset& data, const std::vector<int>& model1,
                             const std::vector<int>& model2, double m,
                             const GPrior& prior) {
  const int p = static_cast<int>(data.p());
  const auto g1 = InclusionVector::from_indices(p, model1, data.n());
  const auto g2 = InclusionVector::from_indices(p, model2, data.n());
  const InclusionVector models[2] = {g1, g2};
  const auto lm = exact_log_marginals(data, models, m, prior);

  ExactEvidence ev;
  ev.log_marginal_1 = lm[0];
  ev.log_marginal_2 = lm[1];
  ev.log_bf_21 = lm[1] - lm[0];

  const SigmaOps single(Allocation::single_cluster(static_cast<int>(data.n())));
  const SigmaOps ident(Allocation::identity(static_cast<int>(data.n())));
  ev.log_bf_21_single_cluster = conditional_log_marginal(single, g2, data, prior) -
                                conditional_log_marginal(single, g1, data, prior);
  ev.log_bf_21_identity = conditional_log_marginal(ident, g2, data, prior) -
                          conditional_log_marginal(ident, g1, data, prior);
  ev.r2_model1_identity = g1.p_gamma() > 0 ? r2_tilde(ident, g1, data) : 0.0;
  ev.r2_model2_identity = g2.p_gamma() > 0 ? r2_tilde(ident, g2, data) : 0.0;
  return ev;
}

std::vector<TrajectorySummary> TrajectoryResult::summaries() const {
  std::map<int, std::vector<double>> by_n;
  for (const auto& pt : points) by_n[pt.n].push_back(pt.log_bf);
  std::vector<TrajectorySummary> out;
  for (auto& [n, vals] : by_n) {
    TrajectorySummary s;
    s.n = n;
    s.q25 = percentile(vals, 0.25);
    s.median = percentile(vals, 0.5);
    s.q75 = percentile(vals, 0.75);
    out.push_back(s);
  }
  return out;
}

TrajectoryResult bf_trajectory(const TrajectoryRequest& req, std::uint64_t seed,
                               int threads) {
  if (req.n_grid.empty()) throw SemigpError("trajectory: empty n grid");
  if (req.replicates < 1) throw SemigpError("trajectory: need at least one replicate");
  const int p = static_cast<int>(req.beta_true.size());
  if (p < 1) throw SemigpError("trajectory: generator needs at least one predictor");
  for (int n : req.n_grid) {
    if (n < 2) throw SemigpError("trajectory: n must be at least 2");
    if (req.mode == TrajectoryMode::exact && n > kMaxExactN)
      throw SemigpError("trajectory: exact mode supports n <= 12; use conditional mode");
  }
  if (req.mode == TrajectoryMode::conditional_identity && !(req.phi > 0))
    throw SemigpError("trajectory: conditional mode needs a positive phi");

  TrajectoryResult result;
  const long total = static_cast<long>(req.n_grid.size()) * req.replicates;
  result.points.resize(total);

  if (req.mode == TrajectoryMode::exact) {
    // warm the integral tables serially
    for (int n : req.n_grid) {
      (void)get_table(n, static_cast<int>(req.model1.size()), req.prior, kDefaultQuadNodes);
      (void)get_table(n, static_cast<int>(req.model2.size()), req.prior, kDefaultQuadNodes);
    }
  }

  parallel_for(total, threads, [&](long idx) {
    const int ni = static_cast<int>(idx) / req.replicates;
    const int rep = static_cast<int>(idx) % req.replicates;
    const int n = req.n_grid[ni];
    RngStream rng = RngStream::derive(seed, 0xB1000000ULL + idx);

    Dataset data;
    if (req.mode == TrajectoryMode::exact) {
      sim::GeneratorSpec spec{req.beta_true, req.residual, n, 0};
      data = sim::generate(spec, rng).train;
    } else {
      // identity-allocation model: residuals N(0, 2/phi)
      Eigen::MatrixXd x(n, p);
      Eigen::VectorXd y(n);
      const double sd = std::sqrt(2.0 / req.phi);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < n; ++i)
        y[i] = x.row(i).dot(req.beta_true) + rng.normal(0.0, sd);
      data = make_dataset(std::move(y), std::move(x));
    }

    const auto g1 = InclusionVector::from_indices(p, req.model1, data.n());
    const auto g2 = InclusionVector::from_indices(p, req.model2, data.n());
    TrajectoryPoint pt;
    pt.n = n;
    pt.replicate = rep;
    const SigmaOps ident(Allocation::identity(n));
    pt.r2_model1 = g1.p_gamma() > 0 ? r2_tilde(ident, g1, data) : 0.0;
    pt.r2_model2 = g2.p_gamma() > 0 ? r2_tilde(ident, g2, data) : 0.0;
    if (req.mode == TrajectoryMode::exact) {
      pt.log_bf = unconditional_log_bf(data, g2, g1, req.m, req.prior);
    } else {
      pt.log_bf = conditional_log_marginal(ident, g2, data, req.prior) -
                  conditional_log_marginal(ident, g1, data, req.prior);
    }
    result.points[idx] = pt;
  });

  if (req.mode == TrajectoryMode::conditional_identity) {
    // b = lim beta' (X' Sigma^-1 X) beta / n = beta'beta / 6 for iid U(-1,1)
    // covariates under the identity allocation.
    const double b = req.beta_true.squaredNorm() / 6.0;
    result.r2_limit = b / (1.0 / req.phi + b);
  }
  return result;
}

}  // namespace semigp::evidence
