// Serial vs OpenMP timings for the two parallel kernels: sweep cells and the
// 2^n subset checks of the asynchronous certificate.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "etcsim/certify.hpp"
#include "etcsim/harness.hpp"

using namespace etcsim;

namespace {

template <class F>
double seconds(F&& f, int reps = 1) {
    const auto a = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count() / reps;
}

}  // namespace

int main() {
    std::printf("threads=%d\n", omp_get_max_threads());

    ExperimentConfig base;
    base.repetitions = 2;
    base.t_end = 40.0;
    const SweepGrid grid = SweepGrid::cross(base, {Strategy::TTC, Strategy::PETC, Strategy::PADETCabs}, {1.0},
                                            {0.1, 0.2}, {0.95}, {85.0});
    std::vector<MetricsReport> a, b;
    const double ts = seconds([&] { a = sweep_serial(grid); });
    const double tp = seconds([&] { b = sweep_parallel(grid); });
    std::printf("sweep   cells=%zu serial=%.3fs parallel=%.3fs speedup=%.2f\n", grid.cells.size(), ts, tp, ts / tp);

    // n = 6 gives 64 subsets of a 49x49 matrix each.
    const std::size_t n = 6;
    Matrix A = Matrix::zeros(n, n), B = Matrix::identity(n), K = -Matrix::identity(n);
    const ClosedLoopMatrices cl = build_closed_loop(A, B, K);
    CertificateBundle c;
    c.P = Matrix::identity(2 * n);
    c.T = 0.1;
    c.beta1 = 0.1;
    c.beta2 = 100.0;
    bool r1 = false, r2 = false;
    const double cs = seconds([&] { r1 = check_padetc_certificate_serial(c, cl); }, 5);
    const double cp = seconds([&] { r2 = check_padetc_certificate(c, cl); }, 5);
    std::printf("bmi     subsets=%d serial=%.4fs parallel=%.4fs speedup=%.2f agree=%s\n", 1 << n, cs, cp, cs / cp,
                r1 == r2 ? "yes" : "no");
    return r1 == r2 ? 0 : 1;
}
