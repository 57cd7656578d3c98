#ifndef SEMIGP_IO_HPP
#define SEMIGP_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "semigp/evidence.hpp"
#include "semigp/simulate.hpp"
#include "semigp/summary.hpp"
#include "semigp/types.hpp"

namespace semigp::io {

// Round-trip safe decimal formatting (17 significant digits, '.' decimal,
// locale independent).
std::string format_double(double v);

RawTable read_csv(std::istream& in);
RawTable read_csv_file(const std::string& path);

void write_summary_csv(std::ostream& out, const PosteriorSummary& s);
void write_summary_json(std::ostream& out, const PosteriorSummary& s);
PosteriorSummary read_summary_json(std::istream& in);

void write_density_csv(std::ostream& out, const Eigen::VectorXd& grid,
                       const Eigen::VectorXd& density);

void write_replicates_csv(std::ostream& out, const std::vector<std::string>& names,
                          const std::vector<std::pair<int, std::vector<sim::ReplicateResult>>>& by_n);

void write_mip_curves_csv(std::ostream& out, const sim::MipCurves& curves,
                          const std::string& method);

void write_trajectory_csv(std::ostream& out, const evidence::TrajectoryResult& t);

// Writes a string to a file, creating parent directories.
void write_file(const std::string& path, const std::string& content);

}  // namespace semigp::io

#endif
