#include "riskdp/lattice.hpp"

#include <algorithm>
#include <cmath>

#ifdef RISKDP_HAVE_OPENMP
#include <omp.h>
#endif

namespace riskdp {

namespace {

constexpr double kFeasTol = 1e-12;

// Total order on candidates: better objective first, then lexicographically
// smaller point. Exact double comparisons keep the order schedule-free.
bool improves(bool maximize, double val, const std::vector<double>& pt,
              const ScanResult& incumbent) {
    if (!incumbent.found) return true;
    if (maximize ? (val > incumbent.value) : (val < incumbent.value)) return true;
    if (val != incumbent.value) return false;
    return std::lexicographical_compare(pt.begin(), pt.end(), incumbent.point.begin(),
                                        incumbent.point.end());
}

void consider(const FeasibleSet& set, const Objective& f, bool maximize,
              const std::vector<double>& pt, ScanResult& incumbent) {
    if (!set.feasible(pt, kFeasTol)) return;
    double val = f(pt);
    if (improves(maximize, val, pt, incumbent)) {
        incumbent.found = true;
        incumbent.value = val;
        incumbent.point = pt;
    }
}

// Enumerate lattice points with a fixed first coordinate: the remaining
// coordinates are swept recursively. Serial and parallel scans share this
// so both construct identical points (same arithmetic, same order).
void sweep_tail(const FeasibleSet& set, int N, const Objective& f, bool maximize,
                std::vector<double>& pt, std::size_t coord, int remaining,
                ScanResult& incumbent) {
    const std::size_t S = set.dim();
    const bool simplex = set.simplex_constrained();
    if (coord == S - 1) {
        // Last coordinate is forced for simplex modes, free for the box.
        if (simplex) {
            pt[coord] = static_cast<double>(remaining) / N;
            consider(set, f, maximize, pt, incumbent);
        } else {
            for (int k = 0; k <= N; ++k) {
                pt[coord] = static_cast<double>(k) / N;
                consider(set, f, maximize, pt, incumbent);
            }
        }
        return;
    }
    const int cap = simplex ? remaining : N;
    for (int k = 0; k <= cap; ++k) {
        pt[coord] = static_cast<double>(k) / N;
        sweep_tail(set, N, f, maximize, pt, coord + 1, simplex ? remaining - k : N,
                   incumbent);
    }
}

ScanResult scan_serial(const FeasibleSet& set, int N, const Objective& f, bool maximize) {
    ScanResult best;
    const std::size_t S = set.dim();
    std::vector<double> pt(S);
    if (S == 1) {
        if (set.simplex_constrained()) {
            pt[0] = 1.0;
            consider(set, f, maximize, pt, best);
        } else {
            for (int k = 0; k <= N; ++k) {
                pt[0] = static_cast<double>(k) / N;
                consider(set, f, maximize, pt, best);
            }
        }
        return best;
    }
    for (int k1 = 0; k1 <= N; ++k1) {
        pt[0] = static_cast<double>(k1) / N;
        sweep_tail(set, N, f, maximize, pt, 1,
                   set.simplex_constrained() ? N - k1 : N, best);
    }
    return best;
}

ScanResult scan_parallel(const FeasibleSet& set, int N, const Objective& f,
                         bool maximize) {
#ifndef RISKDP_HAVE_OPENMP
    return scan_serial(set, N, f, maximize);
#else
    const std::size_t S = set.dim();
    if (S == 1) return scan_serial(set, N, f, maximize);

    int threads = 1;
#pragma omp parallel
    {
#pragma omp single
        threads = omp_get_num_threads();
    }
    std::vector<ScanResult> locals(static_cast<std::size_t>(threads));

#pragma omp parallel
    {
        ScanResult& mine = locals[static_cast<std::size_t>(omp_get_thread_num())];
        std::vector<double> pt(S);
#pragma omp for schedule(dynamic, 4)
        for (int k1 = 0; k1 <= N; ++k1) {
            pt[0] = static_cast<double>(k1) / N;
            sweep_tail(set, N, f, maximize, pt, 1,
                       set.simplex_constrained() ? N - k1 : N, mine);
        }
    }

    // Deterministic merge: the total order makes the winner independent of
    // how lattice slices were distributed over threads.
    ScanResult best;
    for (const auto& loc : locals) {
        if (!loc.found) continue;
        if (improves(maximize, loc.value, loc.point, best)) {
            best.found = true;
            best.value = loc.value;
            best.point = loc.point;
        }
    }
    return best;
#endif
}

} // namespace

ScanResult scan_lattice(const FeasibleSet& set, int resolution, const Objective& f,
                        bool maximize, const std::vector<std::vector<double>>& seeds,
                        RunMode mode) {
    if (resolution < 1) throw Error("lattice resolution must be >= 1");
    const double simplex_points =
        set.simplex_constrained()
            ? [&] {
                  double c = 1.0;
                  for (std::size_t j = 1; j < set.dim(); ++j)
                      c *= static_cast<double>(resolution + j) / static_cast<double>(j);
                  return c;
              }()
            : std::pow(static_cast<double>(resolution) + 1.0,
                       static_cast<double>(set.dim()));
    if (simplex_points > 2e9)
        throw Error("lattice scan would visit more than 2e9 points");

    bool parallel = false;
#ifdef RISKDP_HAVE_OPENMP
    parallel = (mode != RunMode::Serial);
#else
    parallel = (mode == RunMode::Parallel);
#endif
    ScanResult best = parallel ? scan_parallel(set, resolution, f, maximize)
                               : scan_serial(set, resolution, f, maximize);
    for (const auto& seed : seeds)
        consider(set, f, maximize, seed, best);
    return best;
}

ScanResult refine_pattern_search(const FeasibleSet& set, const ScanResult& start,
                                 double step0, double step_min, const Objective& f,
                                 bool maximize) {
    if (!start.found) return start;
    ScanResult best = start;
    const std::size_t S = set.dim();
    double delta = step0;
    std::vector<double> cand;
    // Safety cap: strict-descent steps are finite, but guard regardless.
    int sweeps_left = 100000;
    while (delta >= step_min && sweeps_left-- > 0) {
        ScanResult sweep_best = best;
        if (set.simplex_constrained()) {
            for (std::size_t i = 0; i < S; ++i) {
                for (std::size_t j = 0; j < S; ++j) {
                    if (i == j || best.point[j] < delta) continue;
                    cand = best.point;
                    cand[i] += delta;
                    cand[j] -= delta;
                    consider(set, f, maximize, cand, sweep_best);
                }
            }
        } else {
            for (std::size_t i = 0; i < S; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    cand = best.point;
                    cand[i] = std::clamp(cand[i] + sgn * delta, 0.0, 1.0);
                    consider(set, f, maximize, cand, sweep_best);
                }
            }
        }
        // Continue at this step size only on strict value improvement; a
        // lex-only move is accepted but would otherwise allow long drifts
        // across flat plateaus, so it still halves the step.
        const bool strictly_better =
            maximize ? sweep_best.value > best.value : sweep_best.value < best.value;
        best = sweep_best;
        if (!strictly_better) delta *= 0.5;
    }
    return best;
}

GridOptimum simplex_grid_optimize(const FeasibleSet& set, double h, const Objective& f,
                                  bool maximize, bool refine,
                                  const std::vector<std::vector<double>>& seeds,
                                  RunMode mode) {
    if (!(h > 0.0 && h <= 1.0)) throw Error("grid step must lie in (0, 1]");
    const int N = std::max(1, static_cast<int>(std::lround(1.0 / h)));
    ScanResult best = scan_lattice(set, N, f, maximize, seeds, mode);
    if (!best.found)
        throw EmptyFeasibleSet(std::string("no feasible lattice point for mode ") +
                               allocation_mode_name(set.mode));
    if (refine) best = refine_pattern_search(set, best, h * 0.5, 1e-9, f, maximize);
    GridOptimum out;
    out.value = best.value;
    out.allocation.weights = best.point;
    out.allocation.mode = set.mode;
    return out;
}

} // namespace riskdp
