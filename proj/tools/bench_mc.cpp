// Benchmark: OpenMP-parallel Monte Carlo kernel vs the serial reference.
// Also asserts the two produce bit-identical estimates, which is the whole
// point of the deterministic blocked reduction.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qmarkov/master.hpp"
#include "qmarkov/models.hpp"

namespace {

using namespace qmarkov;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool bit_identical(const MCEstimate& a, const MCEstimate& b) {
    if (a.mean.size() != b.mean.size()) return false;
    for (std::size_t k = 0; k < a.mean.size(); ++k)
        for (std::size_t ti = 0; ti < a.mean[k].size(); ++ti) {
            const Matrix& ma = a.mean[k][ti];
            const Matrix& mb = b.mean[k][ti];
            for (int i = 0; i < ma.size(); ++i)
                if (ma(i) != mb(i)) return false;
            const RealMatrix& ra = a.se_re[k][ti];
            const RealMatrix& rb = b.se_re[k][ti];
            const RealMatrix& ia = a.se_im[k][ti];
            const RealMatrix& ib = b.se_im[k][ti];
            for (int i = 0; i < ra.size(); ++i)
                if (ra(i) != rb(i) || ia(i) != ib(i)) return false;
        }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const long n_samples = argc > 1 ? std::atol(argv[1]) : 20000;
    if (n_samples < 1) {
        std::fprintf(stderr, "usage: %s [n_samples]\n", argv[0]);
        return 1;
    }

    const QuantumModel model = goldstein_model(1.0, 0.5, 1.0);
    Matrix rho0(2, 2);
    rho0 << 0.5, 0.5, 0.5, 0.5;  // |+><+|
    const std::vector<Matrix> rho0s(2, rho0);
    std::vector<double> grid(101);
    for (int i = 0; i < 101; ++i) grid[i] = 5.0 * i / 100.0;
    const std::uint64_t seed = 42;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("mc benchmark: goldstein(J=1, lambda=0.5), %ld samples x 2 start states, "
                "101 grid points, %d thread(s)\n",
                n_samples, threads);

    auto t0 = std::chrono::steady_clock::now();
    const MCEstimate serial = mc_average_serial(model, rho0s, grid, n_samples, seed);
    const double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const MCEstimate parallel = mc_average(model, rho0s, grid, n_samples, seed);
    const double t_parallel = seconds_since(t0);

    std::printf("  serial reference : %8.3f s  (%.1f paths/s)\n", t_serial,
                2.0 * n_samples / t_serial);
    std::printf("  openmp parallel  : %8.3f s  (%.1f paths/s)\n", t_parallel,
                2.0 * n_samples / t_parallel);
    std::printf("  speedup          : %8.2fx\n", t_serial / t_parallel);

    if (!bit_identical(serial, parallel)) {
        std::printf("  FAIL: parallel estimate is not bit-identical to the serial reference\n");
        return 1;
    }
    std::printf("  bit-identical    : yes\n");
    return 0;
}
