#include "semigp/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace semigp {

static bool cell_missing(const std::string& s) {
  if (s.empty()) return true;
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) return true;
  return t == "NA" || t == "na" || t == "NaN" || t == "nan" || t == "?";
}

Dataset make_dataset(Eigen::VectorXd y, Eigen::MatrixXd x,
                     std::vector<std::string> names) {
  const Eigen::Index n = y.size(), p = x.cols();
  if (x.rows() != n) throw SemigpError("dataset: y and x row counts differ");
  if (n < 2) throw SemigpError("dataset: need at least 2 rows");
  if (p < 1) throw SemigpError("dataset: need at least 1 predictor");
  if (!y.allFinite() || !x.allFinite())
    throw SemigpError("dataset: non-finite entries");
  for (Eigen::Index j = 0; j < p; ++j) {
    if ((x.col(j).array() == 0.0).all()) {
      std::ostringstream os;
      os << "dataset: predictor column " << j << " is constant zero";
      throw SemigpError(os.str());
    }
  }
  if (names.empty()) {
    names.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
  }
  if (static_cast<Eigen::Index>(names.size()) != p)
    throw SemigpError("dataset: name count does not match predictor count");
  return Dataset{std::move(y), std::move(x), std::move(names)};
}

TrimmedDataset validate_dataset(const RawTable& table, const std::string& response) {
  const auto ncol = table.columns.size();
  auto rit = std::find(table.columns.begin(), table.columns.end(), response);
  if (rit == table.columns.end())
    throw SemigpError("response column '" + response + "' not found");
  const std::size_t ycol = static_cast<std::size_t>(rit - table.columns.begin());
  if (ncol < 2) throw SemigpError("need at least one predictor column besides the response");

  std::vector<double> yvals;
  std::vector<std::vector<double>> xrows;
  long dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != ncol) {
      std::ostringstream os;
      os << "row " << r + 1 << ": expected " << ncol << " cells, got " << row.size();
      throw SemigpError(os.str());
    }
    bool missing = std::any_of(row.begin(), row.end(), cell_missing);
    if (missing) {
      ++dropped;
      continue;
    }
    std::vector<double> parsed(ncol);
    for (std::size_t c = 0; c < ncol; ++c) {
      try {
        std::size_t pos = 0;
        parsed[c] = std::stod(row[c], &pos);
        while (pos < row[c].size() && std::isspace(static_cast<unsigned char>(row[c][pos]))) ++pos;
        if (pos != row[c].size()) throw std::invalid_argument("trailing junk");
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "row " << r + 1 << ", column '" << table.columns[c]
           << "': cannot parse '" << row[c] << "' as a number";
        throw SemigpError(os.str());
      }
    }
    yvals.push_back(parsed[ycol]);
    std::vector<double> xs;
    xs.reserve(ncol - 1);
    for (std::size_t c = 0; c < ncol; ++c)
      if (c != ycol) xs.push_back(parsed[c]);
    xrows.push_back(std::move(xs));
  }
  if (yvals.empty()) throw SemigpError("all rows contained missing values");

  const Eigen::Index n = static_cast<Eigen::Index>(yvals.size());
  const Eigen::Index p = static_cast<Eigen::Index>(ncol - 1);
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = yvals[i];
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = xrows[i][j];
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < ncol; ++c)
    if (c != ycol) names.push_back(table.columns[c]);
  return TrimmedDataset{make_dataset(std::move(y), std::move(x), std::move(names)), dropped};
}

InclusionVector InclusionVector::all_excluded(int p) {
  InclusionVector v;
  v.bits_.assign(p, 0);
  v.count_ = 0;
  return v;
}

InclusionVector InclusionVector::make(std::vector<char> bits, Eigen::Index n) {
  InclusionVector v;
  v.count_ = static_cast<int>(std::count_if(bits.begin(), bits.end(),
                                            [](char b) { return b != 0; }));
  v.bits_ = std::move(bits);
  if (v.count_ >= n)
    throw SemigpError("inclusion vector: models with >= n predictors have prior probability zero");
  return v;
}

InclusionVector InclusionVector::from_indices(int p, const std::vector<int>& included,
                                              Eigen::Index n) {
  std::vector<char> bits(p, 0);
  for (int j : included) {
    if (j < 0 || j >= p) throw SemigpError("inclusion vector: index out of range");
    bits[j] = 1;
  }
  return make(std::move(bits), n);
}

std::vector<int> InclusionVector::included_indices() const {
  std::vector<int> idx;
  idx.reserve(count_);
  for (int j = 0; j < p(); ++j)
    if (bits_[j]) idx.push_back(j);
  return idx;
}

Allocation Allocation::identity(int n) {
  Allocation a;
  a.labels.resize(n);
  std::iota(a.labels.begin(), a.labels.end(), 0);
  a.sizes.assign(n, 1);
  return a;
}

Allocation Allocation::single_cluster(int n) {
  Allocation a;
  a.labels.assign(n, 0);
  a.sizes.assign(1, n);
  return a;
}

Allocation Allocation::from_labels(std::vector<int> labels) {
  Allocation a;
  int k = 0;
  for (int l : labels) k = std::max(k, l + 1);
  a.sizes.assign(k, 0);
  for (int l : labels) {
    if (l < 0) throw SemigpError("allocation: negative label");
    a.sizes[l] += 1;
  }
  a.labels = std::move(labels);
  a.validate();
  return a;
}

void Allocation::validate() const {
  if (labels.empty()) throw SemigpError("allocation: empty");
  if (static_cast<int>(sizes.size()) > n())
    throw SemigpError("allocation: more clusters than subjects");
  std::vector<int> counts(sizes.size(), 0);
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(sizes.size()))
      throw SemigpError("allocation: label out of range");
    counts[l] += 1;
  }
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    if (sizes[j] <= 0) throw SemigpError("allocation: empty cluster");
    if (sizes[j] != counts[j]) throw SemigpError("allocation: sizes inconsistent with labels");
  }
}

void StickState::recompute_weights() {
  weights.resize(nu.size());
  double stick = 1.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    weights[j] = nu[j] * stick;
    stick *= (1.0 - nu[j]);
  }
}

double StickState::remaining_mass() const {
  double stick = 1.0;
  for (double v : nu) stick *= (1.0 - v);
  return stick;
}

std::vector<int> StickState::occupancy() const {
  std::vector<int> counts(nu.size(), 0);
  for (int l : labels) counts.at(l) += 1;
  return counts;
}

void SamplerConfig::validate() const {
  if (burn_in < 0 || iterations <= burn_in)
    throw SemigpError("config: need iterations > burn_in >= 0");
  if (thin < 1) throw SemigpError("config: thin must be >= 1");
  if (hyper_g_a <= 2.0) throw SemigpError("config: hyper_g_a must exceed 2");
  if (g_grid_size < 10) throw SemigpError("config: g grid size must be >= 10");
  if (m_prior_shape <= 0 || m_prior_rate <= 0)
    throw SemigpError("config: DP mass prior parameters must be positive");
  if (prior_inclusion <= 0 || prior_inclusion >= 1)
    throw SemigpError("config: prior inclusion probability must lie in (0,1)");
  if (phi_prior_shape < 0 || phi_prior_rate < 0)
    throw SemigpError("config: phi prior parameters must be nonnegative");
  if (fixed_dp_mass && *fixed_dp_mass <= 0)
    throw SemigpError("config: fixed DP mass must be positive");
}

void check_state_invariants(const ChainState& state, const Dataset& data) {
  const int n = static_cast<int>(data.n());
  if (!(state.phi > 0)) throw SemigpError("state: phi must be positive");
  if (!(state.g > 0)) throw SemigpError("state: g must be positive");
  if (!(state.dp_mass > 0)) throw SemigpError("state: dp mass must be positive");
  if (state.beta.size() != state.inclusion.p_gamma())
    throw SemigpError("state: beta size does not match p_gamma");
  if (!state.beta.allFinite()) throw SemigpError("state: non-finite beta");
  if (!std::isfinite(state.phi) || !std::isfinite(state.g) || !std::isfinite(state.dp_mass))
    throw SemigpError("state: non-finite scalar");

  const StickState& s = state.sticks;
  if (s.n() != n) throw SemigpError("state: stick labels wrong length");
  if (s.slices.size() != static_cast<std::size_t>(n))
    throw SemigpError("state: slices wrong length");
  if (s.nu.size() != s.weights.size() || s.nu.size() != s.atoms.size())
    throw SemigpError("state: stick arrays inconsistent");
  double wsum = 0.0;
  for (std::size_t j = 0; j < s.nu.size(); ++j) {
    if (!(s.nu[j] > 0 && s.nu[j] < 1)) throw SemigpError("state: nu out of (0,1)");
    if (!(s.weights[j] > 0)) throw SemigpError("state: nonpositive stick weight");
    wsum += s.weights[j];
  }
  if (!(wsum < 1.0 + 1e-12)) throw SemigpError("state: stick weights exceed 1");
  double min_u = 1.0;
  for (int i = 0; i < n; ++i) {
    const int l = s.labels[i];
    if (l < 0 || l >= s.active_count()) throw SemigpError("state: stick label out of range");
    if (!(s.slices[i] > 0 && s.slices[i] < s.weights[l]))
      throw SemigpError("state: slice not in (0, w_{S_i})");
    min_u = std::min(min_u, s.slices[i]);
  }
  // slice coverage: instantiated mass exceeds 1 - min_i u_i
  if (!(wsum > 1.0 - min_u))
    throw SemigpError("state: slice coverage condition violated");

  state.alloc.validate();
  if (state.alloc.n() != n) throw SemigpError("state: allocation wrong length");
}

}  // namespace semigp
