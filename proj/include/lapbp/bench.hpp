#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lapbp/solvers.hpp"

namespace lapbp {

/// Desk-scale convergence benchmark: a grid of (seed x solver) runs over
/// random instances of one shape, emitted as long-format CSV.
struct BenchSpec {
    Index m = 100;
    Index n = 80;
    double density = 0.2;
    long seeds = 20;               ///< seeds seed_base .. seed_base+seeds-1
    std::uint64_t seed_base = 1;
    std::vector<Variant> solvers = {Variant::Pgs, Variant::Ags, Variant::Ags2};
    SolverConfig base_config;      ///< variant is overridden per cell
};

struct BenchRow {
    std::string solver;
    std::uint64_t seed = 0;
    long iter = 0;
    double f = 0;
    double l1 = 0;
    double gap = 0;
    double elapsed_ms = 0;
    double rel_err = 0; ///< (l1 - reference) / reference, per seed
};

struct BenchResult {
    std::vector<BenchRow> rows; ///< ordered by (seed, solver, iter)
    std::vector<std::string> errors;
    bool ok() const noexcept { return errors.empty(); }
};

/// Runs the grid.  The per-seed reference optimum is the exhaustive oracle
/// when m <= 16; otherwise the best converged value across the session's
/// solvers for that seed, falling back to the largest gap-based lower bound
/// max_k (l1_k - gap_k) when no run converged.
BenchResult run_bench(const BenchSpec& spec);

/// CSV with header `solver,seed,iter,f,l1,gap,elapsed_ms,rel_err`.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

} // namespace lapbp
