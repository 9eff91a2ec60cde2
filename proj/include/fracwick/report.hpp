#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracwick/ito.hpp"
#include "fracwick/stats.hpp"

namespace fracwick {

/// `test_name,n_paths,grid_n,estimate,oracle,stderr,z,verdict`
void write_report_csv(std::ostream& os, const std::vector<MonteCarloReport>& rows);

/// `study,n,rms_residual,mean_residual,stderr_mean,max_abs_residual,slope`
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceTable>& tables);

/// Log-log plot of RMS residual against n with the least-squares line and
/// its slope. Throws DomainError on an empty table or non-positive values.
std::string loglog_svg(const ConvergenceTable& table);

/// Heatmap with a value legend. Matrices larger than 64x64 are averaged
/// down to at most 64 cells per side. Throws DomainError when empty.
std::string heatmap_svg(const Eigen::MatrixXd& m, const std::string& title);

/// Writes the text to `path`, reporting I/O failures with the OS message.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fracwick
