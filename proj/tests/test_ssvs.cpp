#include <doctest.h>

#include <cmath>

#include "semigp/ssvs.hpp"
#include "testutil.hpp"

using namespace semigp;
using namespace semigp::ssvs;
using testutil::moments;

namespace {

Dataset fixed_dataset(int n, int p, unsigned seed) {
  RngStream rng(seed);
  Eigen::MatrixXd x = testutil::random_matrix(n, p, rng);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = x(i, 0) - 0.5 * x(i, p - 1) + rng.normal();
  return make_dataset(std::move(y), std::move(x));
}

}  // namespace

TEST_CASE("g grid: a=4 gives equally spaced midpoints on (0,1)") {
  const GGrid grid = GGrid::make(100, 4.0);
  REQUIRE(grid.t_nodes.size() == 100);
  for (int i = 0; i < 100; ++i) {
    CHECK(grid.t_nodes[i] == doctest::Approx((i + 0.5) / 100.0).epsilon(1e-12));
    CHECK(grid.g_nodes[i] ==
          doctest::Approx(grid.t_nodes[i] / (1 - grid.t_nodes[i])).epsilon(1e-12));
  }
  CHECK(std::is_sorted(grid.t_nodes.begin(), grid.t_nodes.end()));
  CHECK(grid.t_nodes.front() > 0.0);
  CHECK(grid.t_nodes.back() < 1.0);
  CHECK(std::isfinite(grid.g_nodes.back()));
}

TEST_CASE("precision update: empty model under the identity allocation") {
  RngStream rng(61);
  const Dataset data = fixed_dataset(12, 2, 611);
  const SigmaOps ops(Allocation::identity(12));
  const auto gamma = InclusionVector::all_excluded(2);
  SamplerConfig cfg;  // improper 1/phi prior
  std::vector<double> draws;
  for (int it = 0; it < 100000; ++it)
    draws.push_back(update_precision(data, ops, gamma, Eigen::VectorXd(), 1.0, cfg, rng));
  const double shape = 6.0;                          // n/2
  const double rate = 0.25 * data.y.squaredNorm();   // (1/2) y' (I/2) y
  const auto ms = moments(draws);
  CHECK(std::abs(ms.mean - shape / rate) / (shape / rate) < 1e-2);
  CHECK(std::abs(ms.var - shape / (rate * rate)) / (shape / (rate * rate)) < 3e-2);
}

TEST_CASE("precision update: zero coefficient block keeps the prior quad out") {
  RngStream rng(62);
  const Dataset data = fixed_dataset(9, 1, 621);
  const SigmaOps ops(Allocation::single_cluster(9));
  const auto gamma = InclusionVector::make({1}, 9);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(1);
  SamplerConfig cfg;
  std::vector<double> draws;
  for (int it = 0; it < 100000; ++it)
    draws.push_back(update_precision(data, ops, gamma, beta, 2.0, cfg, rng));
  const double shape = 5.0;  // (n+1)/2
  const double rate = 0.5 * ops.inv_quad(data.y);
  const auto ms = moments(draws);
  CHECK(std::abs(ms.mean - shape / rate) / (shape / rate) < 1e-2);
}

TEST_CASE("g update: empty model samples the grid uniformly") {
  RngStream rng(63);
  const Dataset data = fixed_dataset(8, 1, 631);
  const SigmaOps ops(Allocation::identity(8));
  const auto gamma = InclusionVector::all_excluded(1);
  const GGrid grid = GGrid::make(1000, 4.0);
  std::vector<double> ts;
  for (int it = 0; it < 100000; ++it) {
    const double g = update_g(ops, data, gamma, Eigen::VectorXd(), 1.0, grid, rng, nullptr);
    ts.push_back(g / (1.0 + g));
  }
  CHECK(testutil::ks_uniform(ts) < 1.63 / std::sqrt(100000.0) + 1e-3);
}

TEST_CASE("g update: two-node grid frequencies match analytic weights") {
  RngStream rng(64);
  const Dataset data = fixed_dataset(10, 1, 641);
  const SigmaOps ops(Allocation::identity(10));
  const auto gamma = InclusionVector::make({1}, 10);
  Eigen::VectorXd beta(1);
  beta << 1.2;
  const double phi = 1.7;

  GGrid grid;
  grid.t_nodes = {0.3, 0.8};
  grid.g_nodes = {0.3 / 0.7, 0.8 / 0.2};
  const double quad = beta.dot(ops.inv_quadform(data.x) * beta);
  auto logw = [&](double g) { return -0.5 * std::log(g) - 0.5 * phi * quad / g; };
  const double w0 = logw(grid.g_nodes[0]), w1 = logw(grid.g_nodes[1]);
  const double p0 = 1.0 / (1.0 + std::exp(w1 - w0));

  long hit0 = 0;
  const long draws = 100000;
  for (long it = 0; it < draws; ++it)
    if (update_g(ops, data, gamma, beta, phi, grid, rng, nullptr) == grid.g_nodes[0]) ++hit0;
  CHECK(std::abs(hit0 / static_cast<double>(draws) - p0) < 0.01);
}

TEST_CASE("g update: larger prior quadratic form shifts mass to larger g") {
  RngStream rng(65);
  const Dataset data = fixed_dataset(10, 1, 651);
  const SigmaOps ops(Allocation::identity(10));
  const auto gamma = InclusionVector::make({1}, 10);
  const GGrid grid = GGrid::make(200, 4.0);
  const double phi = 1.0;
  auto mean_g = [&](double scale) {
    RngStream local(99);
    Eigen::VectorXd beta(1);
    beta << scale;
    double acc = 0;
    const int draws = 20000;
    for (int it = 0; it < draws; ++it)
      acc += update_g(ops, data, gamma, beta, phi, grid, local, nullptr);
    return acc / draws;
  };
  CHECK(mean_g(0.3) < mean_g(3.0));
}

TEST_CASE("inclusion update: orthogonal predictor is excluded more often than not") {
  RngStream rng(66);
  const int n = 12;
  Eigen::MatrixXd x = testutil::random_matrix(n, 1, rng);
  Eigen::VectorXd y = testutil::random_vector(n, rng);
  y -= x * (x.transpose() * x).ldlt().solve(x.transpose() * y);  // exactly orthogonal
  const Dataset data = make_dataset(std::move(y), std::move(x));
  const SigmaOps ops(Allocation::identity(n));
  SamplerConfig cfg;
  long included = 0;
  const long draws = 100000;
  for (long it = 0; it < draws; ++it) {
    const auto out = update_inclusion(data, ops, InclusionVector::all_excluded(1),
                                      /*g=*/3.0, /*phi=*/1.0, cfg, rng, nullptr);
    if (out.included(0)) ++included;
  }
  const double frac = included / static_cast<double>(draws);
  const double want = 1.0 / (1.0 + std::sqrt(1.0 + 3.0));  // penalty-only score
  CHECK(frac < 0.5);
  CHECK(std::abs(frac - want) < 0.01);
}

TEST_CASE("inclusion update: g -> 0 recovers the prior") {
  RngStream rng(67);
  const Dataset data = fixed_dataset(10, 1, 671);
  const SigmaOps ops(Allocation::identity(10));
  SamplerConfig cfg;
  long included = 0;
  const long draws = 100000;
  for (long it = 0; it < draws; ++it) {
    const auto out = update_inclusion(data, ops, InclusionVector::all_excluded(1),
                                      /*g=*/1e-14, /*phi=*/1.0, cfg, rng, nullptr);
    if (out.included(0)) ++included;
  }
  CHECK(std::abs(included / static_cast<double>(draws) - 0.5) < 0.01);
}

TEST_CASE("inclusion update: long-run frequencies match the collapsed posterior") {
  // iterating the one-at-a-time update at fixed (g, phi, A) has the collapsed
  // conditional as its stationary law; enumerate it over the 4 models
  RngStream rng(68);
  const int n = 8;
  const Dataset data = fixed_dataset(n, 2, 681);
  const SigmaOps ops(Allocation::single_cluster(n));
  SamplerConfig cfg;
  const double g = 20.0, phi = 1.1;

  const Eigen::MatrixXd m_full = ops.inv_quadform(data.x);
  const Eigen::VectorXd s_full = ops.inv_cross(data.x, data.y);
  auto score = [&](std::vector<char> bits) {
    std::vector<int> idx;
    for (int j = 0; j < 2; ++j)
      if (bits[j]) idx.push_back(j);
    double quad = 0.0;
    if (!idx.empty()) {
      Eigen::MatrixXd m(idx.size(), idx.size());
      Eigen::VectorXd s(idx.size());
      for (std::size_t a = 0; a < idx.size(); ++a) {
        s[a] = s_full[idx[a]];
        for (std::size_t b = 0; b < idx.size(); ++b) m(a, b) = m_full(idx[a], idx[b]);
      }
      quad = s.dot(m.ldlt().solve(s));
    }
    return -0.5 * idx.size() * std::log1p(g) + 0.5 * phi * g / (1.0 + g) * quad;
  };
  const std::vector<std::vector<char>> models = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  std::vector<double> want;
  double mx = -1e300;
  for (const auto& m : models) {
    want.push_back(score(m));
    mx = std::max(mx, want.back());
  }
  double tot = 0;
  for (double& w : want) {
    w = std::exp(w - mx);
    tot += w;
  }
  for (double& w : want) w /= tot;

  std::vector<long> count(4, 0);
  InclusionVector state = InclusionVector::all_excluded(2);
  const long iters = 200000;
  for (long it = 0; it < iters; ++it) {
    state = update_inclusion(data, ops, state, g, phi, cfg, rng, nullptr);
    count[(state.included(0) ? 1 : 0) + (state.included(1) ? 2 : 0)] += 1;
  }
  for (int m = 0; m < 4; ++m)
    CHECK(std::abs(count[m] / static_cast<double>(iters) - want[m]) < 0.02);
}

TEST_CASE("inclusion update: model dimension stays below n") {
  RngStream rng(69);
  const int n = 3;
  const Dataset data = fixed_dataset(n, 4, 691);
  const SigmaOps ops(Allocation::identity(n));
  SamplerConfig cfg;
  InclusionVector state = InclusionVector::all_excluded(4);
  for (int it = 0; it < 2000; ++it) {
    state = update_inclusion(data, ops, state, 5.0, 1.0, cfg, rng, nullptr);
    CHECK(state.p_gamma() <= n - 1);
  }
}

TEST_CASE("inclusion scores are invariant under joint response/precision rescaling") {
  const Dataset data = fixed_dataset(15, 3, 701);
  Dataset scaled = data;
  const double c = 3.7;
  scaled.y *= c;
  const SigmaOps ops(Allocation::single_cluster(15));
  SamplerConfig cfg;
  const double g = 8.0, phi = 2.0;
  RngStream r1(4242), r2(4242);
  InclusionVector s1 = InclusionVector::all_excluded(3);
  InclusionVector s2 = InclusionVector::all_excluded(3);
  for (int it = 0; it < 3000; ++it) {
    s1 = update_inclusion(data, ops, s1, g, phi, cfg, r1, nullptr);
    s2 = update_inclusion(scaled, ops, s2, g, phi / (c * c), cfg, r2, nullptr);
    CHECK(s1.bits() == s2.bits());
  }
}

TEST_CASE("beta update: empty model is a no-op") {
  RngStream rng(70);
  const Dataset data = fixed_dataset(6, 2, 711);
  const SigmaOps ops(Allocation::identity(6));
  const auto out = update_beta(data, ops, InclusionVector::all_excluded(2),
                               Eigen::VectorXd::Zero(6), 2.0, 1.0, rng);
  CHECK(out.size() == 0);
}

TEST_CASE("beta update: huge g under the identity allocation recovers OLS") {
  const Dataset data = fixed_dataset(40, 2, 721);
  const SigmaOps ops(Allocation::identity(40));
  const auto gamma = InclusionVector::make({1, 1}, 40);
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(40, 0.7);
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  beta_conditional_moments(data, ops, gamma, alpha, 1e12, 2.0, &mean, &cov);
  const Eigen::VectorXd ols = (data.x.transpose() * data.x)
                                  .ldlt()
                                  .solve(data.x.transpose() * (data.y - alpha));
  CHECK(testutil::max_rel_err(mean, ols) < 1e-6);
}

TEST_CASE("beta update: conditional moments match the dense formula") {
  const Dataset data = fixed_dataset(20, 2, 731);
  RngStream rng(73);
  const Allocation alloc = testutil::random_allocation(20, rng);
  const SigmaOps ops(alloc);
  const auto gamma = InclusionVector::make({1, 1}, 20);
  const Eigen::VectorXd alpha = testutil::random_vector(20, rng);
  const double g = 5.0, phi = 1.3;

  // dense route
  const Eigen::MatrixXd sigma_inv =
      testutil::dense_sigma(alloc).ldlt().solve(Eigen::MatrixXd::Identity(20, 20));
  const Eigen::MatrixXd vinv =
      (phi / g) * data.x.transpose() * sigma_inv * data.x +
      phi * data.x.transpose() * data.x;
  const Eigen::MatrixXd vdense = vinv.ldlt().solve(Eigen::MatrixXd::Identity(2, 2));
  const Eigen::VectorXd edense = vdense * (phi * data.x.transpose() * (data.y - alpha));

  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  beta_conditional_moments(data, ops, gamma, alpha, g, phi, &mean, &cov);
  CHECK(testutil::max_rel_err(mean, edense) < 1e-10);
  CHECK(testutil::max_rel_err(cov, vdense) < 1e-10);

  // sampled moments
  const long draws = 100000;
  Eigen::MatrixXd samples(draws, 2);
  for (long d = 0; d < draws; ++d)
    samples.row(d) = update_beta(data, ops, gamma, alpha, g, phi, rng).transpose();
  const Eigen::VectorXd smean = samples.colwise().mean();
  Eigen::MatrixXd centered = samples.rowwise() - smean.transpose();
  const Eigen::MatrixXd scov = centered.transpose() * centered / (draws - 1.0);
  CHECK((smean - edense).cwiseAbs().maxCoeff() <
        3.0 * std::sqrt(vdense.diagonal().maxCoeff() / draws) + 1e-3);
  CHECK((scov - vdense).norm() / vdense.norm() < 5e-2);
}

TEST_CASE("marginal beta draw matches its analytic moments") {
  const Dataset data = fixed_dataset(18, 2, 741);
  RngStream rng(74);
  const Allocation alloc = testutil::random_allocation(18, rng);
  const SigmaOps ops(alloc);
  const auto gamma = InclusionVector::make({1, 1}, 18);
  const double g = 4.0, phi = 0.8;

  const Eigen::MatrixXd q = ops.inv_quadform(data.x);
  const Eigen::VectorXd s = ops.inv_cross(data.x, data.y);
  const double shrink = g / (1.0 + g);
  const Eigen::VectorXd want_mean = shrink * q.ldlt().solve(s);
  const Eigen::MatrixXd want_cov =
      (shrink / phi) * q.ldlt().solve(Eigen::MatrixXd::Identity(2, 2));

  const long draws = 100000;
  Eigen::MatrixXd samples(draws, 2);
  for (long d = 0; d < draws; ++d)
    samples.row(d) = draw_beta_marginal(data, ops, gamma, g, phi, rng).transpose();
  const Eigen::VectorXd smean = samples.colwise().mean();
  Eigen::MatrixXd centered = samples.rowwise() - smean.transpose();
  const Eigen::MatrixXd scov = centered.transpose() * centered / (draws - 1.0);
  CHECK((smean - want_mean).cwiseAbs().maxCoeff() <
        3.0 * std::sqrt(want_cov.diagonal().maxCoeff() / draws) + 1e-3);
  CHECK((scov - want_cov).norm() / want_cov.norm() < 5e-2);
}
