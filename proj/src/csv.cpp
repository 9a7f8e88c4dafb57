#include "qmarkov/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qmarkov/errors.hpp"

namespace qmarkov {

namespace {

std::ofstream open_out(const std::string& path) {
    // Binary mode: the line separator is a single linefeed on every platform.
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw NumericalError("failed writing output file: " + path);
}

// Header suffix "_k_r_c" with 1-based indices.
std::string tag(int k, int r, int c) {
    return "_" + std::to_string(k + 1) + "_" + std::to_string(r + 1) + "_" +
           std::to_string(c + 1);
}

}  // namespace

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_master_csv(const MasterSolution& solution, const std::string& path) {
    const int K = static_cast<int>(solution.components.size());
    if (K == 0) throw ValidationError("write_master_csv: empty solution");
    const int N = static_cast<int>(solution.components[0].empty()
                                       ? 0
                                       : solution.components[0][0].rows());
    std::ofstream out = open_out(path);
    out << "t";
    for (int k = 0; k < K; ++k)
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                out << ",re" << tag(k, r, c) << ",im" << tag(k, r, c);
    out << "\n";
    for (std::size_t ti = 0; ti < solution.grid.size(); ++ti) {
        out << format_g17(solution.grid[ti]);
        for (int k = 0; k < K; ++k) {
            const Matrix& rho = solution.components[k][ti];
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c)
                    out << ',' << format_g17(rho(r, c).real()) << ','
                        << format_g17(rho(r, c).imag());
        }
        out << "\n";
    }
    finish(out, path);
}

void write_mc_csv(const MCEstimate& estimate, const std::string& path) {
    const int K = static_cast<int>(estimate.mean.size());
    if (K == 0) throw ValidationError("write_mc_csv: empty estimate");
    const int N = static_cast<int>(estimate.mean[0].empty() ? 0
                                                            : estimate.mean[0][0].rows());
    std::ofstream out = open_out(path);
    out << "t";
    for (int k = 0; k < K; ++k)
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                out << ",re" << tag(k, r, c) << ",im" << tag(k, r, c) << ",se_re"
                    << tag(k, r, c) << ",se_im" << tag(k, r, c);
    out << "\n";
    for (std::size_t ti = 0; ti < estimate.grid.size(); ++ti) {
        out << format_g17(estimate.grid[ti]);
        for (int k = 0; k < K; ++k) {
            const Matrix& m = estimate.mean[k][ti];
            const RealMatrix& sr = estimate.se_re[k][ti];
            const RealMatrix& si = estimate.se_im[k][ti];
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c)
                    out << ',' << format_g17(m(r, c).real()) << ','
                        << format_g17(m(r, c).imag()) << ',' << format_g17(sr(r, c))
                        << ',' << format_g17(si(r, c));
        }
        out << "\n";
    }
    finish(out, path);
}

void write_observables_csv(const std::vector<double>& grid,
                           const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& values,
                           const std::string& path) {
    if (values.size() != names.size())
        throw ValidationError("write_observables_csv: one value column per name required");
    for (const auto& col : values)
        if (col.size() != grid.size())
            throw ValidationError("write_observables_csv: column length must match grid");
    std::ofstream out = open_out(path);
    out << "t";
    for (const auto& name : names) out << ',' << name;
    out << "\n";
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
        out << format_g17(grid[ti]);
        for (std::size_t c = 0; c < names.size(); ++c) out << ',' << format_g17(values[c][ti]);
        out << "\n";
    }
    finish(out, path);
}

void write_zscore_csv(const std::vector<double>& grid,
                      const std::vector<std::vector<RealMatrix>>& z_re,
                      const std::vector<std::vector<RealMatrix>>& z_im,
                      const std::string& path) {
    const int K = static_cast<int>(z_re.size());
    if (K == 0 || z_im.size() != z_re.size())
        throw ValidationError("write_zscore_csv: inconsistent z-score tables");
    const int N = static_cast<int>(z_re[0].empty() ? 0 : z_re[0][0].rows());
    std::ofstream out = open_out(path);
    out << "t";
    for (int k = 0; k < K; ++k)
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                out << ",z_re" << tag(k, r, c) << ",z_im" << tag(k, r, c);
    out << "\n";
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
        out << format_g17(grid[ti]);
        for (int k = 0; k < K; ++k)
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c)
                    out << ',' << format_g17(z_re[k][ti](r, c)) << ','
                        << format_g17(z_im[k][ti](r, c));
        out << "\n";
    }
    finish(out, path);
}

void write_laplace_csv(const std::vector<Complex>& s_values,
                       const std::vector<double>& residuals,
                       const std::string& path) {
    if (s_values.size() != residuals.size())
        throw ValidationError("write_laplace_csv: one residual per s value required");
    std::ofstream out = open_out(path);
    out << "s_re,s_im,residual_fro\n";
    for (std::size_t i = 0; i < s_values.size(); ++i)
        out << format_g17(s_values[i].real()) << ',' << format_g17(s_values[i].imag())
            << ',' << format_g17(residuals[i]) << "\n";
    finish(out, path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open csv file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty csv file: " + path);
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) table.header.push_back(field);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(table.header.size());
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
        if (row.size() != table.header.size())
            throw ValidationError("csv row width mismatch in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qmarkov
