#ifndef SEMIGP_TYPES_HPP
#define SEMIGP_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semigp {

class SemigpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Regression data: response y and an n x p predictor matrix without an
// intercept column (the residual density carries the unknown mean).
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::vector<std::string> names;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index p() const { return x.cols(); }
};

// Validates invariants: finite entries, n >= 2, p >= 1, no all-zero predictor
// column. Throws SemigpError with a descriptive message.
Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                     std::vector<std::string> names = {});

// Raw tabular input prior to validation (cells as strings; empty or NA cells
// count as missing).
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct TrimmedDataset {
  Dataset data;
  long dropped_rows = 0;
};

// Drops rows containing missing cells, parses the rest and builds a Dataset
// with `response` as y and all other columns as predictors. A non-missing
// cell that fails to parse as a number is an error naming row and column.
TrimmedDataset validate_dataset(const RawTable& table, const std::string& response);

// Variable-inclusion indicators. The model space excludes models with n or
// more predictors, so construction enforces p_gamma <= min(p, n-1).
class InclusionVector {
 public:
  InclusionVector() = default;
  static InclusionVector all_excluded(int p);
  // Validating constructor; n is the sample size bounding the model dimension.
  static InclusionVector make(std::vector<char> bits, Eigen::Index n);
  static InclusionVector from_indices(int p, const std::vector<int>& included,
                                      Eigen::Index n);

  int p() const { return static_cast<int>(bits_.size()); }
  int p_gamma() const { return count_; }
  bool included(int j) const { return bits_[j] != 0; }
  const std::vector<char>& bits() const { return bits_; }
  std::vector<int> included_indices() const;

  bool operator==(const InclusionVector& o) const { return bits_ == o.bits_; }

 private:
  std::vector<char> bits_;
  int count_ = 0;
};

// Cluster allocation of the n subjects; implicitly represents the n x k
// binary allocation matrix. Cluster ids are 0-based and every cluster is
// nonempty.
struct Allocation {
  std::vector<int> labels;  // size n, values in 0..k-1
  std::vector<int> sizes;   // size k, all positive, sums to n

  int n() const { return static_cast<int>(labels.size()); }
  int k() const { return static_cast<int>(sizes.size()); }

  static Allocation identity(int n);        // every subject its own cluster
  static Allocation single_cluster(int n);  // A = 1_n
  static Allocation from_labels(std::vector<int> labels);

  void validate() const;  // throws on inconsistency
};

// Stick-breaking state of the Dirichlet-process residual mixture, including
// the per-subject slice variables and stick assignments.
struct StickState {
  std::vector<double> nu;       // stick fractions, in (0,1)
  std::vector<double> weights;  // w_j = nu_j * prod_{l<j} (1 - nu_l)
  std::vector<double> atoms;    // cluster intercepts, N(0, 1/phi) base measure
  std::vector<double> slices;   // u_i in (0, w_{S_i})
  std::vector<int> labels;      // stick index per subject, 0-based

  int active_count() const { return static_cast<int>(nu.size()); }
  int n() const { return static_cast<int>(labels.size()); }

  void recompute_weights();
  // 1 - sum_j w_j = prod_j (1 - nu_j)
  double remaining_mass() const;
  // per-stick occupancy counts (length active_count)
  std::vector<int> occupancy() const;
};

// Full Gibbs state of one chain. The residual precision phi multiplies all
// quadratic forms and is the inverse of the residual variance parameter.
struct ChainState {
  InclusionVector inclusion;
  Eigen::VectorXd beta;  // coefficients of the included predictors only
  double phi = 1.0;      // residual precision, > 0
  double g = 1.0;        // g-prior scale, > 0
  double dp_mass = 1.0;  // DP precision m, > 0
  StickState sticks;
  Allocation alloc;      // derived from sticks.labels (occupied sticks only)
};

struct SamplerConfig {
  long iterations = 50000;
  long burn_in = 5000;
  long thin = 1;
  double hyper_g_a = 4.0;      // hyper-g prior, t = g/(1+g) ~ Be(1, a/2-1)
  double m_prior_shape = 0.1;  // a_m
  double m_prior_rate = 1.0;   // b_m
  int g_grid_size = 1000;
  double prior_inclusion = 0.5;
  std::uint64_t rng_seed = 0;

  // phi prior Ga(shape, rate); (0, 0) is the improper 1/phi prior.
  double phi_prior_shape = 0.0;
  double phi_prior_rate = 0.0;
  // When set, the DP mass is pinned to this value and its update is skipped
  // (used when comparing against fixed-m evidence enumeration).
  std::optional<double> fixed_dp_mass;
  // Label-swap mixing moves between consecutive sticks after the allocation
  // update; correctness does not depend on them.
  bool label_swap_moves = true;
  int max_sticks_factor = 10;  // hard cap M <= factor * n

  void validate() const;  // throws on invalid combinations
};

// Throws if any structural invariant of the chain state fails (dimensions,
// positivity, stick weights, slice coverage, allocation consistency).
void check_state_invariants(const ChainState& state, const Dataset& data);

}  // namespace semigp

#endif
