#include "semigp/chain.hpp"

#include <cassert>
#include <cmath>

namespace semigp {

Chain::Chain(Dataset data, SamplerConfig cfg, ResidualModel model, RngStream rng)
    : data_(std::move(data)),
      cfg_(cfg),
      model_(model),
      rng_(rng),
      grid_(ssvs::GGrid::make(cfg.g_grid_size, cfg.hyper_g_a)) {
  cfg_.validate();
  init();
}

void Chain::init() {
  const int n = static_cast<int>(data_.n());
  state_.inclusion = InclusionVector::all_excluded(static_cast<int>(data_.p()));
  state_.beta = Eigen::VectorXd();
  const double var = (data_.y.array() - data_.y.mean()).square().sum() /
                     std::max(1, n - 1);
  state_.phi = 1.0 / std::max(var, 1e-12);
  state_.g = static_cast<double>(n);
  state_.dp_mass = cfg_.fixed_dp_mass ? *cfg_.fixed_dp_mass
                                      : cfg_.m_prior_shape / cfg_.m_prior_rate;

  StickState& s = state_.sticks;
  if (model_ == ResidualModel::slm) {
    s.nu = {0.5};
  } else {
    s.nu = {1.0 - 1e-12};  // single pinned stick carrying all mass
  }
  s.atoms = {0.0};
  s.labels.assign(n, 0);
  s.recompute_weights();
  s.slices.assign(n, 0.5 * s.weights[0]);
  state_.alloc = Allocation::single_cluster(n);
}

void Chain::replace_response(const Eigen::VectorXd& y) {
  if (y.size() != data_.n()) throw SemigpError("replace_response: length mismatch");
  data_.y = y;
}

double Chain::stick_weighted_intercept() const {
  const StickState& s = state_.sticks;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < s.weights.size(); ++j) {
    num += s.weights[j] * s.atoms[j];
    den += s.weights[j];
  }
  return num / den;
}

void Chain::sweep() {
  StickState& sticks = state_.sticks;

  if (model_ == ResidualModel::slm) {
    dp::compact_sticks(sticks);
    dp::update_sticks(sticks, state_.dp_mass, rng_);
    // mixing move in the slice-marginalized bracket, before new slices
    if (cfg_.label_swap_moves) dp::label_swap_moves(sticks, rng_);
    dp::update_slices_and_extend(sticks, state_.dp_mass, state_.phi, rng_,
                                 cfg_.max_sticks_factor * static_cast<int>(data_.n()));
    dp::update_allocations(sticks, data_, state_.inclusion, state_.beta,
                           state_.phi, rng_);
    state_.alloc = dp::derive_allocation(sticks);
    if (!cfg_.fixed_dp_mass)
      state_.dp_mass = dp::update_dp_mass(sticks, cfg_.m_prior_shape,
                                          cfg_.m_prior_rate, rng_);
  }

  const SigmaOps ops(state_.alloc);
  state_.phi = ssvs::update_precision(data_, ops, state_.inclusion, state_.beta,
                                      state_.g, cfg_, rng_);
  state_.g = ssvs::update_g(ops, data_, state_.inclusion, state_.beta,
                            state_.phi, grid_, rng_, &diag_);
  state_.inclusion = ssvs::update_inclusion(data_, ops, state_.inclusion,
                                            state_.g, state_.phi, cfg_, rng_, &diag_);

  // Atom refresh from the coefficient-marginalized conditional, by
  // composition; the discarded coefficient draw only carries the atoms.
  const Eigen::VectorXd beta_aux =
      ssvs::draw_beta_marginal(data_, ops, state_.inclusion, state_.g, state_.phi, rng_);
  dp::update_atoms(sticks, data_, state_.inclusion, beta_aux, state_.phi, rng_);

  Eigen::VectorXd alpha(data_.n());
  for (Eigen::Index i = 0; i < data_.n(); ++i) alpha[i] = sticks.atoms[sticks.labels[i]];
  state_.beta = ssvs::update_beta(data_, ops, state_.inclusion, alpha,
                                  state_.g, state_.phi, rng_);

#ifndef NDEBUG
  check_state_invariants(state_, data_);
#endif
}

void Chain::record(Draws& out) const {
  const int p = out.p;
  for (int j = 0; j < p; ++j)
    out.gamma.push_back(state_.inclusion.included(j) ? 1 : 0);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
  const auto idx = state_.inclusion.included_indices();
  for (std::size_t c = 0; c < idx.size(); ++c) full[idx[c]] = state_.beta[c];
  out.beta.row(out.phi.size()) = full.transpose();
  out.phi.push_back(state_.phi);
  out.g.push_back(state_.g);
  out.m.push_back(state_.dp_mass);
  out.n_sticks.push_back(state_.sticks.active_count());
  out.intercept.push_back(stick_weighted_intercept());
  out.sticks.push_back(dp::StickSnapshot{state_.sticks.weights, state_.sticks.atoms,
                                         state_.phi});
}

Draws Chain::run() {
  Draws out;
  out.p = static_cast<int>(data_.p());
  const long retained = (cfg_.iterations - cfg_.burn_in + cfg_.thin - 1) / cfg_.thin;
  out.beta.resize(retained, out.p);
  out.gamma.reserve(retained * out.p);
  long kept = 0;
  for (long it = 0; it < cfg_.iterations; ++it) {
    sweep();
    if (it >= cfg_.burn_in && (it - cfg_.burn_in) % cfg_.thin == 0) {
      record(out);
      ++kept;
    }
    if (!std::isfinite(state_.phi) || !std::isfinite(state_.g))
      throw SemigpError("chain diverged: non-finite state");
  }
  out.beta.conservativeResize(kept, out.p);
  return out;
}

}  // namespace semigp
