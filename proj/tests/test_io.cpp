#include <doctest.h>

#include <sstream>

#include "semigp/io.hpp"
#include "testutil.hpp"

using namespace semigp;

TEST_CASE("csv parsing: header, quoting, carriage returns") {
  std::istringstream in("a,\"b,c\",d\r\n1, 2 ,3\n4,,6\n");
  const RawTable t = io::read_csv(in);
  REQUIRE(t.columns.size() == 3);
  CHECK(t.columns[1] == "b,c");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "2");
  CHECK(t.rows[1][1] == "");
}

TEST_CASE("format_double round trips exactly") {
  for (double v : {1.0 / 3.0, 1e-17, -0.0, 3.141592653589793, 7.25, 1e300}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("summary JSON round trip compares equal") {
  PosteriorSummary s;
  s.names = {"age", "bmi"};
  s.mip = Eigen::Vector2d(1.0 / 3.0, 0.97);
  s.beta_hat = Eigen::Vector2d(-1.23456789012345e-5, 2.0);
  s.ci_low = Eigen::Vector2d(-2.5, 1.5);
  s.ci_high = Eigen::Vector2d(0.5, 2.5);
  s.median_probability_model = {0, 1};
  s.lags = {1, 5, 10, 25, 50};
  s.autocorr.resize(2, 5);
  s.autocorr << 0.9, 0.5, 0.25, 0.1, 0.05, 0.8, 0.4, 0.2, 0.1, 1.0 / 7.0;
  s.phi_hat = 0.138;
  s.g_hat = 42.4242424242;
  s.m_hat = 0.3;
  s.intercept_hat = -0.125;

  std::ostringstream out;
  io::write_summary_json(out, s);
  std::istringstream in(out.str());
  const PosteriorSummary back = io::read_summary_json(in);
  CHECK(back == s);
}

TEST_CASE("summary CSV has one row per predictor") {
  PosteriorSummary s;
  s.names = {"x1"};
  s.mip = Eigen::VectorXd::Constant(1, 0.75);
  s.beta_hat = Eigen::VectorXd::Constant(1, 1.5);
  s.ci_low = Eigen::VectorXd::Constant(1, 1.0);
  s.ci_high = Eigen::VectorXd::Constant(1, 2.0);
  s.median_probability_model = {1};
  s.lags = {1, 5, 10, 25, 50};
  s.autocorr = Eigen::MatrixXd::Zero(1, 5);
  std::ostringstream out;
  io::write_summary_csv(out, s);
  const std::string text = out.str();
  CHECK(text.find("predictor,mip,beta_hat") == 0);
  CHECK(text.find("x1,0.75,1.5,1,2,1") != std::string::npos);
}

TEST_CASE("density csv shape") {
  Eigen::VectorXd grid(2), dens(2);
  grid << -1, 1;
  dens << 0.125, 0.25;
  std::ostringstream out;
  io::write_density_csv(out, grid, dens);
  CHECK(out.str() == "residual,density\n-1,0.125\n1,0.25\n");
}

TEST_CASE("trajectory csv columns are pinned") {
  evidence::TrajectoryResult t;
  t.points.push_back({8, 0, -1.5, 0.25, 0.5});
  std::ostringstream out;
  io::write_trajectory_csv(out, t);
  CHECK(out.str() == "n,replicate,log_bf,r2_model1,r2_model2\n8,0,-1.5,0.25,0.5\n");
}
