#include "semigp/dp_slice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semigp::dp {

void update_sticks(StickState& sticks, double m, RngStream& rng) {
  const int M = sticks.active_count();
  std::vector<int> counts = sticks.occupancy();
  // suffix[h] = sum_{j>h} n_j
  std::vector<double> suffix(M, 0.0);
  for (int h = M - 2; h >= 0; --h) suffix[h] = suffix[h + 1] + counts[h + 1];
  for (int h = 0; h < M; ++h) {
    double v = rng.beta(1.0 + counts[h], m + suffix[h]);
    v = std::clamp(v, 1e-15, 1.0 - 1e-15);
    sticks.nu[h] = v;
  }
  sticks.recompute_weights();
}

void update_slices_and_extend(StickState& sticks, double m, double phi,
                              RngStream& rng, int max_sticks) {
  const int n = sticks.n();
  double min_u = 1.0;
  for (int i = 0; i < n; ++i) {
    const double w = sticks.weights[sticks.labels[i]];
    double u = rng.uniform() * w;
    u = std::min(std::max(u, std::numeric_limits<double>::min()), w * (1.0 - 1e-16));
    sticks.slices[i] = u;
    min_u = std::min(min_u, u);
  }
  double rest = sticks.remaining_mass();  // mass beyond the instantiated sticks
  double stick_tail = rest;
  while (rest >= min_u) {
    if (sticks.active_count() >= max_sticks)
      throw SemigpError("slice sampler: stick count exceeded hard cap; "
                        "check DP mass and data scale");
    double v = std::clamp(rng.beta(1.0, m), 1e-15, 1.0 - 1e-15);
    sticks.nu.push_back(v);
    sticks.weights.push_back(v * stick_tail);
    sticks.atoms.push_back(rng.normal(0.0, 1.0 / std::sqrt(phi)));
    stick_tail *= (1.0 - v);
    rest = stick_tail;
  }
}

void update_allocations(StickState& sticks, const Dataset& data,
                        const InclusionVector& inclusion,
                        const Eigen::VectorXd& beta, double phi, RngStream& rng) {
  const int n = sticks.n();
  const int M = sticks.active_count();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  if (inclusion.p_gamma() > 0) {
    const auto idx = inclusion.included_indices();
    for (int c = 0; c < inclusion.p_gamma(); ++c)
      mean += beta[c] * data.x.col(idx[c]);
  }
  std::vector<double> logw(M);
  std::vector<int> cand(M);
  for (int i = 0; i < n; ++i) {
    const double u = sticks.slices[i];
    int ncand = 0;
    for (int h = 0; h < M; ++h) {
      if (sticks.weights[h] > u) {
        const double r = data.y[i] - mean[i] - sticks.atoms[h];
        cand[ncand] = h;
        logw[ncand] = -0.5 * phi * r * r;
        ++ncand;
      }
    }
    if (ncand == 0)
      throw SemigpError("slice sampler: empty candidate set (coverage invariant violated)");
    const int pick =
        rng.categorical_from_log(std::span<const double>(logw.data(), ncand));
    sticks.labels[i] = cand[pick < 0 ? 0 : pick];
  }
}

int label_swap_moves(StickState& sticks, RngStream& rng) {
  // Runs in the slice-marginalized bracket (after the stick update, before
  // fresh slice variables are drawn): the allocation prior is then
  // prod_i w_{S_i}, giving the stick-weight Metropolis ratio.
  const int M = sticks.active_count();
  if (M < 2) return 0;
  std::vector<int> counts = sticks.occupancy();
  int accepted = 0;
  for (int j = 0; j + 1 < M; ++j) {
    const int nj = counts[j], nk = counts[j + 1];
    if (nj == 0 && nk == 0) continue;
    // moving the last occupied stick's members into an empty slot below
    // would shrink the instantiated range; that move changes dimension and
    // is not covered by the fixed-dimension ratio
    if (nj == 0 && j + 1 == M - 1) continue;
    const double wj = sticks.weights[j], wk = sticks.weights[j + 1];
    const double log_ratio = (nj - nk) * (std::log(wk) - std::log(wj));
    if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
      for (int i = 0; i < sticks.n(); ++i) {
        if (sticks.labels[i] == j)
          sticks.labels[i] = j + 1;
        else if (sticks.labels[i] == j + 1)
          sticks.labels[i] = j;
      }
      std::swap(sticks.atoms[j], sticks.atoms[j + 1]);
      std::swap(counts[j], counts[j + 1]);
      ++accepted;
    }
  }
  return accepted;
}

double update_dp_mass(const StickState& sticks, double a_m, double b_m,
                      RngStream& rng) {
  const int M = sticks.active_count();
  double log_sum = 0.0;
  for (double v : sticks.nu) log_sum += std::log1p(-v);
  const double rate = b_m - log_sum;  // > b_m since each log1p(-v) < 0
  return rng.gamma_rate(a_m + M, rate);
}

void update_atoms(StickState& sticks, const Dataset& data,
                  const InclusionVector& inclusion, const Eigen::VectorXd& beta,
                  double phi, RngStream& rng) {
  const int n = sticks.n();
  const int M = sticks.active_count();
  Eigen::VectorXd resid = data.y;
  if (inclusion.p_gamma() > 0) {
    const auto idx = inclusion.included_indices();
    for (int c = 0; c < inclusion.p_gamma(); ++c)
      resid -= beta[c] * data.x.col(idx[c]);
  }
  std::vector<double> rsum(M, 0.0);
  std::vector<int> counts(M, 0);
  for (int i = 0; i < n; ++i) {
    rsum[sticks.labels[i]] += resid[i];
    counts[sticks.labels[i]] += 1;
  }
  for (int h = 0; h < M; ++h) {
    if (counts[h] > 0) {
      const double prec = phi * (counts[h] + 1.0);
      const double mean = rsum[h] / (counts[h] + 1.0);
      sticks.atoms[h] = rng.normal(mean, 1.0 / std::sqrt(prec));
    } else {
      sticks.atoms[h] = rng.normal(0.0, 1.0 / std::sqrt(phi));
    }
  }
}

void compact_sticks(StickState& sticks) {
  int last = -1;
  for (int l : sticks.labels) last = std::max(last, l);
  const int keep = last + 1;
  if (keep < sticks.active_count()) {
    sticks.nu.resize(keep);
    sticks.atoms.resize(keep);
    sticks.recompute_weights();
  }
}

Allocation derive_allocation(const StickState& sticks) {
  const int M = sticks.active_count();
  std::vector<int> cluster_of(M, -1);
  std::vector<int> labels(sticks.n());
  int k = 0;
  std::vector<int> counts = sticks.occupancy();
  for (int h = 0; h < M; ++h)
    if (counts[h] > 0) cluster_of[h] = k++;
  Allocation a;
  a.sizes.assign(k, 0);
  for (int i = 0; i < sticks.n(); ++i) {
    const int c = cluster_of[sticks.labels[i]];
    labels[i] = c;
    a.sizes[c] += 1;
  }
  a.labels = std::move(labels);
  return a;
}

Eigen::VectorXd residual_density_estimate(const std::vector<StickSnapshot>& draws,
                                          const Eigen::VectorXd& grid) {
  if (draws.empty()) throw SemigpError("residual density: no retained draws");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.size());
  for (const auto& d : draws) {
    double wsum = 0.0;
    for (double w : d.weights) wsum += w;
    const double sd = 1.0 / std::sqrt(d.phi);
    const double norm = 1.0 / (sd * std::sqrt(2.0 * M_PI));
    for (Eigen::Index gidx = 0; gidx < grid.size(); ++gidx) {
      double f = 0.0;
      for (std::size_t j = 0; j < d.weights.size(); ++j) {
        const double z = (grid[gidx] - d.atoms[j]) / sd;
        f += d.weights[j] * norm * std::exp(-0.5 * z * z);
      }
      acc[gidx] += f / wsum;
    }
  }
  return acc / static_cast<double>(draws.size());
}

}  // namespace semigp::dp
