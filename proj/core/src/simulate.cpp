#include "semigp/simulate.hpp"

#include <cmath>

#include "semigp/parallel.hpp"
#include "semigp/summary.hpp"

namespace semigp::sim {

ResidualLaw ResidualLaw::gaussian(double mean, double var) {
  ResidualLaw law;
  law.kind = Kind::gaussian;
  law.mean = mean;
  law.var = var;
  law.validate();
  return law;
}

ResidualLaw ResidualLaw::two_component(double w, double mu1, double var1,
                                       double mu2, double var2) {
  ResidualLaw law;
  law.kind = Kind::two_component;
  law.w = w;
  law.mu1 = mu1;
  law.var1 = var1;
  law.mu2 = mu2;
  law.var2 = var2;
  law.validate();
  return law;
}

void ResidualLaw::validate() const {
  if (kind == Kind::gaussian) {
    if (!(var > 0)) throw SemigpError("residual law: variance must be positive");
  } else {
    if (!(w > 0 && w < 1)) throw SemigpError("residual law: mixture weight outside (0,1)");
    if (!(var1 > 0 && var2 > 0))
      throw SemigpError("residual law: component variances must be positive");
  }
}

double ResidualLaw::draw(RngStream& rng) const {
  if (kind == Kind::gaussian) return rng.normal(mean, std::sqrt(var));
  if (rng.bernoulli(w)) return rng.normal(mu1, std::sqrt(var1));
  return rng.normal(mu2, std::sqrt(var2));
}

double ResidualLaw::mean_value() const {
  if (kind == Kind::gaussian) return mean;
  return w * mu1 + (1.0 - w) * mu2;
}

double ResidualLaw::variance() const {
  if (kind == Kind::gaussian) return var;
  const double m = mean_value();
  return w * (var1 + mu1 * mu1) + (1.0 - w) * (var2 + mu2 * mu2) - m * m;
}

namespace {

Eigen::VectorXd paper_coefficients() {
  Eigen::VectorXd b(10);
  b << 3, 2, -1, 0, 1.5, 1, 0, -4, -1.5, 0;
  return b;
}

}  // namespace

GeneratorSpec GeneratorSpec::case_one(int n, int test_n) {
  GeneratorSpec spec;
  spec.beta_true = paper_coefficients();
  spec.residual = ResidualLaw::two_component(0.5, 2.5, 1.0, -2.5, 1.0);
  spec.n = n;
  spec.test_n = test_n;
  return spec;
}

GeneratorSpec GeneratorSpec::case_two(int n, int test_n) {
  GeneratorSpec spec;
  spec.beta_true = paper_coefficients();
  spec.residual = ResidualLaw::gaussian(1.0, 1.0);  // intercept 1, unit variance
  spec.n = n;
  spec.test_n = test_n;
  return spec;
}

GeneratedData generate(const GeneratorSpec& spec, RngStream& rng) {
  spec.residual.validate();
  const int p = spec.p();
  if (p < 1) throw SemigpError("generator: needs at least one predictor");
  if (spec.n < 2) throw SemigpError("generator: n must be at least 2");

  auto draw_block = [&](int rows) {
    Eigen::MatrixXd x(rows, p);
    Eigen::VectorXd y(rows);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < p; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
      y[i] = x.row(i).dot(spec.beta_true) + spec.residual.draw(rng);
    }
    return make_dataset(std::move(y), std::move(x));
  };

  GeneratedData out{draw_block(spec.n), std::nullopt};
  if (spec.test_n >= 2) out.test = draw_block(spec.test_n);
  return out;
}

namespace {

ReplicateResult evaluate_chain(const GeneratorSpec& spec, const SamplerConfig& config,
                               ResidualModel method, const GeneratedData& data,
                               int replicate, RngStream stream) {
  ReplicateResult res;
  res.replicate = replicate;
  res.method = method;
  const int p = spec.p();
  try {
    Chain chain(data.train, config, method, stream);
    const Draws draws = chain.run();
    const long nd = draws.size();
    res.mip.setZero(p);
    res.beta_hat.setZero(p);
    res.ci_low.setZero(p);
    res.ci_high.setZero(p);
    std::vector<double> col(nd);
    for (int j = 0; j < p; ++j) {
      long inc = 0;
      double sum = 0;
      for (long d = 0; d < nd; ++d) {
        col[d] = draws.beta(d, j);
        sum += col[d];
        if (draws.gamma_at(d, j)) ++inc;
      }
      res.mip[j] = static_cast<double>(inc) / nd;
      res.beta_hat[j] = sum / nd;
      res.ci_low[j] = percentile(col, 0.025);
      res.ci_high[j] = percentile(col, 0.975);
    }
    double isum = 0;
    for (double v : draws.intercept) isum += v;
    res.intercept_hat = isum / nd;

    res.beta_mse = (res.beta_hat - spec.beta_true).norm() / p;
    bool correct = true;
    for (int j = 0; j < p; ++j) {
      const bool truly_in = spec.beta_true[j] != 0.0;
      if ((res.mip[j] > 0.5) != truly_in) correct = false;
    }
    res.median_model_correct = correct;

    if (data.test) {
      const Eigen::VectorXd pred =
          data.test->x * res.beta_hat +
          Eigen::VectorXd::Constant(data.test->n(), res.intercept_hat);
      res.oos_mse = (data.test->y - pred).squaredNorm() / data.test->n();
    }
  } catch (const SemigpError&) {
    res.diverged = true;
  }
  return res;
}

}  // namespace

std::vector<ReplicateResult> run_replicates(const GeneratorSpec& spec,
                                            const SamplerConfig& config,
                                            BaselineMode baseline, int replicates,
                                            std::uint64_t master_seed, int threads) {
  if (replicates < 1) throw SemigpError("run_replicates: need at least one replicate");
  config.validate();
  const bool do_slm = baseline != BaselineMode::nlm;
  const bool do_nlm = baseline != BaselineMode::slm;
  const int per_rep = (do_slm ? 1 : 0) + (do_nlm ? 1 : 0);
  std::vector<ReplicateResult> out(static_cast<std::size_t>(replicates) * per_rep);

  parallel_for(replicates, threads, [&](long rep) {
    RngStream data_stream = RngStream::derive(master_seed, 3 * rep);
    const GeneratedData data = generate(spec, data_stream);
    int slot = static_cast<int>(rep) * per_rep;
    if (do_slm) {
      out[slot++] = evaluate_chain(spec, config, ResidualModel::slm, data,
                                   static_cast<int>(rep),
                                   RngStream::derive(master_seed, 3 * rep + 1));
    }
    if (do_nlm) {
      out[slot++] = evaluate_chain(spec, config, ResidualModel::nlm, data,
                                   static_cast<int>(rep),
                                   RngStream::derive(master_seed, 3 * rep + 2));
    }
  });
  return out;
}

MipCurves mip_curves(const std::vector<std::pair<int, std::vector<ReplicateResult>>>& by_n,
                     ResidualModel method, const std::vector<std::string>& names) {
  if (by_n.empty()) throw SemigpError("mip_curves: no results");
  const int p = static_cast<int>(names.size());
  MipCurves curves;
  curves.names = names;
  curves.mean_mip.resize(p, static_cast<Eigen::Index>(by_n.size()));
  for (std::size_t c = 0; c < by_n.size(); ++c) {
    curves.n_grid.push_back(by_n[c].first);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(p);
    long count = 0;
    for (const auto& r : by_n[c].second) {
      if (r.method != method || r.diverged) continue;
      acc += r.mip;
      ++count;
    }
    if (count == 0) throw SemigpError("mip_curves: no usable replicates for one sample size");
    curves.mean_mip.col(static_cast<Eigen::Index>(c)) = acc / static_cast<double>(count);
  }
  return curves;
}

}  // namespace semigp::sim
