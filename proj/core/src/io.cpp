#include "semigp/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace semigp::io {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  for (auto& s : cells) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
      s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    s = s.substr(b);
  }
  return cells;
}

}  // namespace

RawTable read_csv(std::istream& in) {
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw SemigpError("csv: empty input");
  table.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_csv_line(line));
  }
  return table;
}

RawTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemigpError("cannot open '" + path + "'");
  return read_csv(in);
}

void write_summary_csv(std::ostream& out, const PosteriorSummary& s) {
  out << "predictor,mip,beta_hat,ci_low,ci_high,in_median_model";
  for (int lag : s.lags) out << ",autocorr_lag" << lag;
  out << "\n";
  for (std::size_t j = 0; j < s.names.size(); ++j) {
    out << s.names[j] << ',' << format_double(s.mip[j]) << ','
        << format_double(s.beta_hat[j]) << ',' << format_double(s.ci_low[j]) << ','
        << format_double(s.ci_high[j]) << ',' << int(s.median_probability_model[j]);
    for (Eigen::Index l = 0; l < s.autocorr.cols(); ++l)
      out << ',' << format_double(s.autocorr(j, l));
    out << "\n";
  }
}

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

}  // namespace

void write_summary_json(std::ostream& out, const PosteriorSummary& s) {
  nlohmann::json j;
  j["predictors"] = s.names;
  j["mip"] = vec_to_json(s.mip);
  j["beta_hat"] = vec_to_json(s.beta_hat);
  j["ci_low"] = vec_to_json(s.ci_low);
  j["ci_high"] = vec_to_json(s.ci_high);
  std::vector<int> mpm(s.median_probability_model.begin(), s.median_probability_model.end());
  j["median_probability_model"] = mpm;
  j["lags"] = s.lags;
  nlohmann::json ac = nlohmann::json::array();
  for (Eigen::Index r = 0; r < s.autocorr.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < s.autocorr.cols(); ++c) row.push_back(s.autocorr(r, c));
    ac.push_back(row);
  }
  j["autocorr"] = ac;
  j["phi_hat"] = s.phi_hat;
  j["g_hat"] = s.g_hat;
  j["m_hat"] = s.m_hat;
  j["intercept_hat"] = s.intercept_hat;
  out << j.dump(2) << "\n";
}

PosteriorSummary read_summary_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  PosteriorSummary s;
  s.names = j.at("predictors").get<std::vector<std::string>>();
  s.mip = vec_from_json(j.at("mip"));
  s.beta_hat = vec_from_json(j.at("beta_hat"));
  s.ci_low = vec_from_json(j.at("ci_low"));
  s.ci_high = vec_from_json(j.at("ci_high"));
  for (int v : j.at("median_probability_model").get<std::vector<int>>())
    s.median_probability_model.push_back(static_cast<char>(v));
  s.lags = j.at("lags").get<std::vector<int>>();
  const auto& ac = j.at("autocorr");
  s.autocorr.resize(static_cast<Eigen::Index>(ac.size()),
                    static_cast<Eigen::Index>(s.lags.size()));
  for (std::size_t r = 0; r < ac.size(); ++r)
    for (std::size_t c = 0; c < ac[r].size(); ++c)
      s.autocorr(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          ac[r][c].get<double>();
  s.phi_hat = j.at("phi_hat").get<double>();
  s.g_hat = j.at("g_hat").get<double>();
  s.m_hat = j.at("m_hat").get<double>();
  s.intercept_hat = j.at("intercept_hat").get<double>();
  return s;
}

void write_density_csv(std::ostream& out, const Eigen::VectorXd& grid,
                       const Eigen::VectorXd& density) {
  out << "residual,density\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out << format_double(grid[i]) << ',' << format_double(density[i]) << "\n";
}

void write_replicates_csv(std::ostream& out, const std::vector<std::string>& names,
                          const std::vector<std::pair<int, std::vector<sim::ReplicateResult>>>& by_n) {
  out << "n,replicate,method,oos_mse,beta_mse,median_model_correct,diverged,intercept_hat";
  for (const auto& nm : names) out << ",mip_" << nm;
  for (const auto& nm : names) out << ",beta_" << nm;
  for (const auto& nm : names) out << ",ci_low_" << nm;
  for (const auto& nm : names) out << ",ci_high_" << nm;
  out << "\n";
  for (const auto& [n, results] : by_n) {
    for (const auto& r : results) {
      out << n << ',' << r.replicate << ','
          << (r.method == ResidualModel::slm ? "slm" : "nlm") << ','
          << format_double(r.oos_mse) << ',' << format_double(r.beta_mse) << ','
          << (r.median_model_correct ? 1 : 0) << ',' << (r.diverged ? 1 : 0) << ','
          << format_double(r.intercept_hat);
      for (Eigen::Index j = 0; j < r.mip.size(); ++j) out << ',' << format_double(r.mip[j]);
      for (Eigen::Index j = 0; j < r.beta_hat.size(); ++j)
        out << ',' << format_double(r.beta_hat[j]);
      for (Eigen::Index j = 0; j < r.ci_low.size(); ++j)
        out << ',' << format_double(r.ci_low[j]);
      for (Eigen::Index j = 0; j < r.ci_high.size(); ++j)
        out << ',' << format_double(r.ci_high[j]);
      out << "\n";
    }
  }
}

void write_mip_curves_csv(std::ostream& out, const sim::MipCurves& curves,
                          const std::string& method) {
  out << "method,predictor,n,mean_mip\n";
  for (std::size_t j = 0; j < curves.names.size(); ++j)
    for (std::size_t c = 0; c < curves.n_grid.size(); ++c)
      out << method << ',' << curves.names[j] << ',' << curves.n_grid[c] << ','
          << format_double(curves.mean_mip(static_cast<Eigen::Index>(j),
                                           static_cast<Eigen::Index>(c)))
          << "\n";
}

void write_trajectory_csv(std::ostream& out, const evidence::TrajectoryResult& t) {
  out << "n,replicate,log_bf,r2_model1,r2_model2\n";
  for (const auto& pt : t.points)
    out << pt.n << ',' << pt.replicate << ',' << format_double(pt.log_bf) << ','
        << format_double(pt.r2_model1) << ',' << format_double(pt.r2_model2) << "\n";
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw SemigpError("cannot write '" + path + "'");
  out << content;
}

}  // namespace semigp::io
