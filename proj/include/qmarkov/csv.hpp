#pragma once

#include <string>
#include <vector>

#include "qmarkov/master.hpp"
#include "qmarkov/resolvent.hpp"

namespace qmarkov {

// All emitters share the same contract: comma-separated, a single header
// line, one row per record, every number printed with 17 significant digits
// (round-trip exact for IEEE doubles), lines terminated by a single linefeed.

// Round-trip-exact decimal rendering of a double.
std::string format_g17(double x);

// t, then re_k_r_c, im_k_r_c per start state k and entry (r, c); indices are
// 1-based, entries ordered k-major, then row, then column.
void write_master_csv(const MasterSolution& solution, const std::string& path);

// Same layout with se_re_k_r_c, se_im_k_r_c appended inside each entry group.
void write_mc_csv(const MCEstimate& estimate, const std::string& path);

// t, then one column per observable name.
void write_observables_csv(const std::vector<double>& grid,
                           const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& values,
                           const std::string& path);

// t, then z_re_k_r_c, z_im_k_r_c.
void write_zscore_csv(const std::vector<double>& grid,
                      const std::vector<std::vector<RealMatrix>>& z_re,
                      const std::vector<std::vector<RealMatrix>>& z_im,
                      const std::string& path);

// s_re, s_im, residual_fro: fixed point vs direct resolvent, per point.
void write_laplace_csv(const std::vector<Complex>& s_values,
                       const std::vector<double>& residuals,
                       const std::string& path);

// Minimal reader for round-trip tests: returns header fields and numeric rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string& path);

}  // namespace qmarkov
