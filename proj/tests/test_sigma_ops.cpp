#include <doctest.h>

#include <chrono>

#include "semigp/sigma_ops.hpp"
#include "testutil.hpp"

using namespace semigp;
using testutil::dense_sigma;
using testutil::max_rel_err;
using testutil::random_allocation;

TEST_CASE("inverse apply: identity allocation halves the vector") {
  RngStream rng(11);
  const int n = 8;
  const SigmaOps ops(Allocation::identity(n));
  const Eigen::VectorXd v = testutil::random_vector(n, rng);
  const Eigen::VectorXd got = ops.inv_apply(v);
  CHECK((got - 0.5 * v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inverse apply: single subject single cluster") {
  // n=1 requires bypassing dataset checks; allocation supports it directly
  Allocation a;
  a.labels = {0};
  a.sizes = {1};
  const SigmaOps ops(a);
  Eigen::VectorXd v(1);
  v << 4.0;
  CHECK(ops.inv_apply(v)[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("inverse apply matches dense inverse on random allocations") {
  RngStream rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + rng.uniform_int(19);
    const Allocation alloc = random_allocation(n, rng);
    const SigmaOps ops(alloc);
    const Eigen::MatrixXd sigma = dense_sigma(alloc);
    const Eigen::VectorXd v = testutil::random_vector(n, rng);
    const Eigen::VectorXd want = sigma.ldlt().solve(v);
    CHECK(max_rel_err(ops.inv_apply(v), want) < 1e-10);
  }
}

TEST_CASE("quadform: identity allocation is exactly half the gram matrix") {
  RngStream rng(13);
  const int n = 30, q = 4;
  const Eigen::MatrixXd x = testutil::random_matrix(n, q, rng);
  const SigmaOps ops(Allocation::identity(n));
  const Eigen::MatrixXd got = ops.inv_quadform(x);
  const Eigen::MatrixXd half = 0.5 * SigmaOps::gram(x);
  CHECK((got - half).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadform: single cluster matches dense computation") {
  RngStream rng(14);
  const int n = 12, q = 3;
  const Eigen::MatrixXd x = testutil::random_matrix(n, q, rng);
  const Allocation alloc = Allocation::single_cluster(n);
  const SigmaOps ops(alloc);
  const Eigen::MatrixXd want =
      x.transpose() * dense_sigma(alloc).ldlt().solve(x);
  CHECK(max_rel_err(ops.inv_quadform(x), want) < 1e-10);
}

TEST_CASE("quadform: zero column gives zero matrix") {
  const int n = 6;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, 1);
  const SigmaOps ops(Allocation::single_cluster(n));
  CHECK(ops.inv_quadform(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("inverse sqrt: identity allocation scales by 1/sqrt(2)") {
  RngStream rng(15);
  const int n = 9;
  const Eigen::VectorXd v = testutil::random_vector(n, rng);
  const SigmaOps ops(Allocation::identity(n));
  CHECK(max_rel_err(ops.inv_sqrt_apply(v), v / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("inverse sqrt matches dense eigendecomposition, three-subject cluster") {
  RngStream rng(16);
  const int n = 3;
  const Allocation alloc = Allocation::single_cluster(n);
  const SigmaOps ops(alloc);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_sigma(alloc));
  const Eigen::MatrixXd isqrt = es.operatorInverseSqrt();
  const Eigen::VectorXd v = testutil::random_vector(n, rng);
  CHECK(max_rel_err(ops.inv_sqrt_apply(v), isqrt * v) < 1e-10);
}

TEST_CASE("inverse sqrt of zero is zero") {
  const SigmaOps ops(Allocation::single_cluster(4));
  CHECK(ops.inv_sqrt_apply(Eigen::VectorXd::Zero(4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("applying inverse-sqrt twice equals the inverse") {
  RngStream rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rng.uniform_int(30);
    const Allocation alloc = random_allocation(n, rng);
    const SigmaOps ops(alloc);
    const Eigen::VectorXd v = testutil::random_vector(n, rng);
    const Eigen::VectorXd twice = ops.inv_sqrt_apply(ops.inv_sqrt_apply(v));
    CHECK(max_rel_err(twice, ops.inv_apply(v)) < 1e-10);
  }
}

TEST_CASE("log det: closed forms") {
  CHECK(SigmaOps(Allocation::identity(5)).log_det() ==
        doctest::Approx(5.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(SigmaOps(Allocation::single_cluster(9)).log_det() ==
        doctest::Approx(std::log(10.0)).epsilon(1e-15));
}

TEST_CASE("log det matches dense determinant on random allocations") {
  RngStream rng(18);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rng.uniform_int(14);
    const Allocation alloc = random_allocation(n, rng);
    const double want = std::log(dense_sigma(alloc).determinant());
    CHECK(testutil::rel_err(SigmaOps(alloc).log_det(), want) < 1e-10);
  }
}

TEST_CASE("property: all closed forms agree with dense oracles, n <= 50") {
  RngStream rng(19);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + rng.uniform_int(49);
    const int q = 1 + rng.uniform_int(5);
    const Allocation alloc = random_allocation(n, rng);
    const SigmaOps ops(alloc);
    const Eigen::MatrixXd sigma = dense_sigma(alloc);
    const Eigen::MatrixXd x = testutil::random_matrix(n, q, rng);
    const Eigen::VectorXd v = testutil::random_vector(n, rng);

    const Eigen::MatrixXd sigma_inv = sigma.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    CHECK(max_rel_err(ops.inv_apply(v), sigma_inv * v) < 1e-10);
    CHECK(max_rel_err(ops.inv_quadform(x), x.transpose() * sigma_inv * x) < 1e-10);
    CHECK(max_rel_err(ops.inv_cross(x, v), x.transpose() * sigma_inv * v) < 1e-10);
    CHECK(testutil::rel_err(ops.inv_quad(v), v.dot(sigma_inv * v)) < 1e-10);
    CHECK(testutil::rel_err(ops.log_det(), std::log(sigma.determinant())) < 1e-10);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    CHECK(max_rel_err(ops.inv_sqrt_apply(v), es.operatorInverseSqrt() * v) < 1e-10);
  }
}

TEST_CASE("property: X' Sigma^-1 X is dominated by X'X in the PSD order") {
  RngStream rng(20);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 5 + rng.uniform_int(30);
    const int q = 1 + rng.uniform_int(4);
    const Allocation alloc = random_allocation(n, rng);
    const Eigen::MatrixXd x = testutil::random_matrix(n, q, rng);
    const Eigen::MatrixXd diff =
        SigmaOps(alloc).inv_quadform(x) - x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff);
    CHECK(es.eigenvalues().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("cost contract: applies at n = 10^4 run in linear time and space") {
  RngStream rng(21);
  const int n = 10000, q = 5;
  const Allocation alloc = random_allocation(n, rng);
  const SigmaOps ops(alloc);
  // extra space is the two per-cluster scalar vectors
  CHECK(static_cast<int>(ops.d_inv().size()) == alloc.k());
  const Eigen::MatrixXd x = testutil::random_matrix(n, q, rng);
  const Eigen::VectorXd v = testutil::random_vector(n, rng);
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (int rep = 0; rep < 50; ++rep) {
    acc += ops.inv_apply(v);
    acc += ops.inv_sqrt_apply(v);
  }
  const Eigen::MatrixXd m = ops.inv_quadform(x);
  const auto elapsed = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - t0).count();
  CHECK(acc.allFinite());
  CHECK(m.allFinite());
  CHECK(elapsed < 2.0);  // 100 applies + a quadform; dense algebra could not
}
