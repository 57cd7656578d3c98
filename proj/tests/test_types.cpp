#include <doctest.h>

#include "semigp/types.hpp"
#include "testutil.hpp"

using namespace semigp;

TEST_CASE("validate_dataset drops rows with missing cells") {
  RawTable t;
  t.columns = {"y", "a", "b"};
  t.rows = {{"1.0", "2.0", "3.0"}, {"2.0", "", "1.0"}, {"0.5", "1.5", "-1.0"}};
  const auto out = validate_dataset(t, "y");
  CHECK(out.dropped_rows == 1);
  CHECK(out.data.n() == 2);
  CHECK(out.data.p() == 2);
  CHECK(out.data.y[0] == 1.0);
  CHECK(out.data.x(1, 1) == -1.0);
  CHECK(out.data.names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("validate_dataset identity on complete rows") {
  RawTable t;
  t.columns = {"a", "y"};
  t.rows = {{"1", "2"}, {"3", "4"}, {"-1", "0.25"}};
  const auto out = validate_dataset(t, "y");
  CHECK(out.dropped_rows == 0);
  CHECK(out.data.n() == 3);
  CHECK(out.data.y[2] == 0.25);
}

TEST_CASE("validate_dataset handles a 365-row 10-predictor table") {
  RawTable t;
  t.columns = {"resp"};
  for (int j = 0; j < 10; ++j) t.columns.push_back("p" + std::to_string(j));
  RngStream rng(7);
  for (int i = 0; i < 365; ++i) {
    std::vector<std::string> row{std::to_string(rng.normal())};
    for (int j = 0; j < 10; ++j) row.push_back(std::to_string(rng.normal()));
    t.rows.push_back(row);
  }
  const auto out = validate_dataset(t, "resp");
  CHECK(out.data.n() == 365);
  CHECK(out.data.p() == 10);
  CHECK(out.dropped_rows == 0);
}

TEST_CASE("validate_dataset errors") {
  RawTable t;
  t.columns = {"y", "a"};
  t.rows = {{"1", "oops"}, {"2", "3"}};
  CHECK_THROWS_WITH_AS(validate_dataset(t, "y"),
                       doctest::Contains("column 'a'"), SemigpError);

  RawTable all_missing;
  all_missing.columns = {"y", "a"};
  all_missing.rows = {{"", "1"}, {"2", "NA"}};
  CHECK_THROWS_AS(validate_dataset(all_missing, "y"), SemigpError);

  CHECK_THROWS_AS(validate_dataset(t, "nope"), SemigpError);
}

TEST_CASE("dataset invariants") {
  Eigen::VectorXd y(2);
  y << 1, 2;
  Eigen::MatrixXd zero(2, 1);
  zero.setZero();
  CHECK_THROWS_AS(make_dataset(y, zero), SemigpError);

  Eigen::MatrixXd ok(2, 1);
  ok << 1, -1;
  CHECK_NOTHROW(make_dataset(y, ok));

  Eigen::VectorXd bad = y;
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_dataset(bad, ok), SemigpError);

  Eigen::VectorXd one(1);
  one << 1;
  Eigen::MatrixXd onex(1, 1);
  onex << 1;
  CHECK_THROWS_AS(make_dataset(one, onex), SemigpError);
}

TEST_CASE("inclusion vector rejects saturated models") {
  CHECK_THROWS_AS(InclusionVector::make({1, 1, 1}, 3), SemigpError);
  CHECK_THROWS_AS(InclusionVector::make({1, 1}, 2), SemigpError);
  const auto ok = InclusionVector::make({1, 0, 1}, 4);
  CHECK(ok.p_gamma() == 2);
  CHECK(ok.included_indices() == std::vector<int>{0, 2});
}

TEST_CASE("allocation consistency") {
  const auto a = Allocation::from_labels({0, 1, 0, 2, 1});
  CHECK(a.k() == 3);
  CHECK(a.sizes == std::vector<int>{2, 2, 1});
  Allocation bad = a;
  bad.sizes[0] = 3;
  CHECK_THROWS_AS(bad.validate(), SemigpError);
}

TEST_CASE("sampler config invariants") {
  SamplerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.burn_in = cfg.iterations;
  CHECK_THROWS_AS(cfg.validate(), SemigpError);
  cfg = SamplerConfig{};
  cfg.hyper_g_a = 2.0;
  CHECK_THROWS_AS(cfg.validate(), SemigpError);
  cfg = SamplerConfig{};
  cfg.g_grid_size = 5;
  CHECK_THROWS_AS(cfg.validate(), SemigpError);
}
