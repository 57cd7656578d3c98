#ifndef SEMIGP_CHAIN_HPP
#define SEMIGP_CHAIN_HPP

#include <Eigen/Dense>
#include <vector>

#include "semigp/dp_slice.hpp"
#include "semigp/rng.hpp"
#include "semigp/sigma_ops.hpp"
#include "semigp/ssvs.hpp"
#include "semigp/types.hpp"

namespace semigp {

// slm: full semiparametric model. nlm: normal-linear baseline, the A = 1_n
// special case; the allocation is pinned to a single cluster and the DP
// updates are skipped, everything else runs through the same code.
enum class ResidualModel { slm, nlm };

// Columnar buffer of retained draws.
struct Draws {
  int p = 0;
  std::vector<std::uint8_t> gamma;  // size() * p, row-major
  Eigen::MatrixXd beta;             // size() x p, zeros for excluded predictors
  std::vector<double> phi, g, m;
  std::vector<int> n_sticks;
  std::vector<double> intercept;    // stick-weighted atom mean per draw
  std::vector<dp::StickSnapshot> sticks;

  long size() const { return static_cast<long>(phi.size()); }
  bool gamma_at(long d, int j) const { return gamma[d * p + j] != 0; }
};

// One Gibbs chain. The sweep follows the fixed order: stick fractions,
// slices and extension, allocations (plus optional label swaps), DP mass,
// precision, g, inclusion indicators, coefficients. Because the precision
// and inclusion updates integrate the cluster intercepts out while the
// allocation and coefficient updates condition on them, the atoms are
// refreshed between the inclusion and coefficient updates from their
// coefficient-marginalized conditional, drawn by composition (marginal
// coefficient draw, then the conjugate atom update). The final coefficient
// draw then conditions on the fresh atoms.
class Chain {
 public:
  Chain(Dataset data, SamplerConfig cfg, ResidualModel model, RngStream rng);

  void sweep();
  Draws run();  // iterations sweeps, recording post burn-in every thin

  const ChainState& state() const { return state_; }
  ChainState& mutable_state() { return state_; }
  const Dataset& data() const { return data_; }
  ResidualModel model() const { return model_; }
  const ssvs::GGrid& grid() const { return grid_; }
  const ssvs::Diagnostics& diagnostics() const { return diag_; }
  RngStream& rng() { return rng_; }

  // Replaces the response vector (joint-correctness tests re-simulate data).
  void replace_response(const Eigen::VectorXd& y);

  double stick_weighted_intercept() const;

 private:
  void init();
  void record(Draws& out) const;

  Dataset data_;
  SamplerConfig cfg_;
  ResidualModel model_;
  RngStream rng_;
  ssvs::GGrid grid_;
  ChainState state_;
  ssvs::Diagnostics diag_;
};

}  // namespace semigp

#endif
