#ifndef SEMIGP_DP_SLICE_HPP
#define SEMIGP_DP_SLICE_HPP

#include <Eigen/Dense>
#include <vector>

#include "semigp/rng.hpp"
#include "semigp/types.hpp"

namespace semigp::dp {

// Stick fractions given occupancy: nu_h ~ Be(1 + n_h, m + sum_{j>h} n_j).
void update_sticks(StickState& sticks, double m, RngStream& rng);

// Slice variables u_i ~ U(0, w_{S_i}), then extend the stick list (nu ~
// Be(1,m), atom ~ N(0, 1/phi)) until the instantiated mass exceeds
// 1 - min_i u_i, so every candidate set {j : w_j > u_i} is fully
// instantiated. Throws if the stick count would exceed max_sticks.
void update_slices_and_extend(StickState& sticks, double m, double phi,
                              RngStream& rng, int max_sticks);

// Reassign each subject among sticks with w_h > u_i, with probability
// proportional to N(y_i; alpha_h + x_i' beta, 1/phi).
void update_allocations(StickState& sticks, const Dataset& data,
                        const InclusionVector& inclusion,
                        const Eigen::VectorXd& beta, double phi, RngStream& rng);

// Metropolis label-swap between consecutive sticks (memberships and atoms
// move together, stick fractions stay in place). Acceptance ratio is the
// stick-weight ratio times the slice feasibility indicators. Returns the
// number of accepted swaps.
int label_swap_moves(StickState& sticks, RngStream& rng);

// DP mass m ~ Ga(a_m + M, b_m - sum_l log(1 - nu_l)).
double update_dp_mass(const StickState& sticks, double a_m, double b_m,
                      RngStream& rng);

// Conjugate atom refresh: occupied stick h gets precision phi (n_h + 1) and
// mean sum_{i in h} (y_i - x_i' beta) / (n_h + 1); unoccupied sticks redraw
// from the N(0, 1/phi) base measure.
void update_atoms(StickState& sticks, const Dataset& data,
                  const InclusionVector& inclusion, const Eigen::VectorXd& beta,
                  double phi, RngStream& rng);

// Drop trailing unoccupied sticks (they are prior draws nothing conditions
// on); sticks below the last occupied index are kept in place.
void compact_sticks(StickState& sticks);

// Occupied sticks compressed to clusters 0..k-1 in order of stick index.
Allocation derive_allocation(const StickState& sticks);

// One retained draw of the residual mixture: instantiated stick weights and
// atoms plus the precision.
struct StickSnapshot {
  std::vector<double> weights;
  std::vector<double> atoms;
  double phi = 1.0;
};

// Pointwise posterior mean of the residual density over a grid: each draw
// contributes sum_j w_j N(e; alpha_j, 1/phi) renormalized over the
// instantiated sticks.
Eigen::VectorXd residual_density_estimate(const std::vector<StickSnapshot>& draws,
                                          const Eigen::VectorXd& grid);

}  // namespace semigp::dp

#endif
