// Lattice-scan benchmark: the serial reference kernel against the OpenMP
// kernel on the same feasible sets and objectives, checking that both
// return bit-identical optima. Objectives mirror the decomposition hot
// paths: a cheap piecewise-linear CVaR reallocation and an expensive
// entropic reallocation with a golden-section solve per point.
//
// Usage: bench_lattice [cheap_resolution] [entropic_resolution]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "riskdp/allocation.hpp"
#include "riskdp/distribution.hpp"
#include "riskdp/lattice.hpp"
#include "riskdp/risk_measures.hpp"

namespace {

using namespace riskdp;

double time_scan(const FeasibleSet& set, int resolution, const Objective& f,
                 RunMode mode, ScanResult& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = scan_lattice(set, resolution, f, false, {}, mode);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Number of lattice points the simplex scan visits: compositions of N into
// dim nonnegative parts.
long long simplex_points(int resolution, int dim) {
    long long n = 1;
    for (int i = 1; i < dim; ++i)
        n = n * (resolution + i) / i;
    return n;
}

void report(const char* name, int resolution, long long points, double serial_s,
            double parallel_s, bool identical) {
    std::printf("%-14s N=%-6d %10lld pts  serial %8.3fs (%8.0f pts/s)  "
                "parallel %8.3fs (%8.0f pts/s)  speedup %.2fx  identical %s\n",
                name, resolution, points, serial_s, points / serial_s, parallel_s,
                points / parallel_s, serial_s / parallel_s,
                identical ? "yes" : "NO");
}

} // namespace

int main(int argc, char** argv) {
    const int cheap_n = argc > 1 ? std::atoi(argv[1]) : 1500;
    const int entropic_n = argc > 2 ? std::atoi(argv[2]) : 120;

    const double alpha = 0.3;
    const std::vector<double> phat{0.25, 0.25, 0.5};
    const std::vector<FiniteDistribution> dists{
        make_distribution({-4.0, 1.0, 6.0}, {0.25, 0.5, 0.25}),
        make_distribution({-2.0, 3.0}, {0.5, 0.5}),
        make_distribution({-6.0, 0.0, 2.0, 8.0}, {0.125, 0.375, 0.375, 0.125}),
    };

    const auto clamp01 = [](double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); };

    const Objective cvar_obj = [&](const std::vector<double>& z) {
        double v = 0.0;
        for (std::size_t s = 0; s < z.size(); ++s) {
            if (z[s] <= 0.0) continue;
            v += z[s] * cvar(dists[s], RiskLevel(clamp01(alpha * z[s] / phat[s])));
        }
        return v;
    };
    const Objective evar_obj = [&](const std::vector<double>& z) {
        double v = 0.0;
        for (std::size_t s = 0; s < z.size(); ++s) {
            if (z[s] <= 0.0) continue;
            v += z[s] *
                 evar(dists[s], RiskLevel(clamp01(alpha * z[s] / phat[s]))).value;
        }
        return v;
    };

    const FeasibleSet simplex{AllocationMode::SimplexCapped, alpha, phat, {}};
    const FeasibleSet kl_ball{AllocationMode::KlCapped, alpha, phat, {}};

#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("compiled without OpenMP: both kernels run serially\n");
#endif

    ScanResult serial, parallel;
    bool all_identical = true;

    double s = time_scan(simplex, cheap_n, cvar_obj, RunMode::Serial, serial);
    double p = time_scan(simplex, cheap_n, cvar_obj, RunMode::Parallel, parallel);
    bool same = serial.found == parallel.found && serial.value == parallel.value &&
                serial.point == parallel.point;
    all_identical = all_identical && same;
    report("cvar-linear", cheap_n, simplex_points(cheap_n, 3), s, p, same);

    s = time_scan(kl_ball, entropic_n, evar_obj, RunMode::Serial, serial);
    p = time_scan(kl_ball, entropic_n, evar_obj, RunMode::Parallel, parallel);
    same = serial.found == parallel.found && serial.value == parallel.value &&
           serial.point == parallel.point;
    all_identical = all_identical && same;
    report("evar-golden", entropic_n, simplex_points(entropic_n, 3), s, p, same);

    return all_identical ? 0 : 1;
}
