#include "lapbp/bench.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "lapbp/instance.hpp"
#include "lapbp/oracle.hpp"

namespace lapbp {

BenchResult run_bench(const BenchSpec& spec) {
    BenchResult result;
    for (long s = 0; s < spec.seeds; ++s) {
        const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(s);
        BpInstance inst = [&spec, seed] {
            return random_instance(spec.m, spec.n, spec.density, seed);
        }();

        std::vector<std::pair<std::string, SolverRun>> runs;
        for (Variant variant : spec.solvers) {
            SolverConfig config = spec.base_config;
            config.variant = variant;
            SolverRun run = solve(inst, config);
            if (run.status == SolveStatus::Error) {
                std::ostringstream msg;
                msg << variant_name(variant) << " seed " << seed << ": "
                    << run.error_message;
                result.errors.push_back(msg.str());
            }
            runs.emplace_back(variant_name(variant), std::move(run));
        }

        // Reference optimum for this seed's instance.
        double reference = 0.0;
        if (spec.m <= kOracleSizeLimit) {
            reference = brute_force_bp(inst).optimum_value;
        } else {
            bool converged = false;
            double best_final = 0.0;
            double best_bound = 0.0;
            bool have_bound = false;
            for (const auto& [name, run] : runs) {
                if (run.status == SolveStatus::GapReached &&
                    run.final_s.size() > 0) {
                    const double l1 = run.final_s.lpNorm<1>();
                    best_final = converged ? std::min(best_final, l1) : l1;
                    converged = true;
                }
                for (const auto& row : run.trace) {
                    const double bound = row.l1 - row.gap;
                    best_bound = have_bound ? std::max(best_bound, bound) : bound;
                    have_bound = true;
                }
            }
            reference = converged ? best_final : best_bound;
        }

        for (const auto& [name, run] : runs) {
            for (const auto& row : run.trace) {
                BenchRow out;
                out.solver = name;
                out.seed = seed;
                out.iter = row.k;
                out.f = row.f;
                out.l1 = row.l1;
                out.gap = row.gap;
                out.elapsed_ms = row.elapsed_ms;
                out.rel_err = reference > 0.0
                                  ? (row.l1 - reference) / reference
                                  : row.l1;
                result.rows.push_back(std::move(out));
            }
        }
    }
    return result;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "solver,seed,iter,f,l1,gap,elapsed_ms,rel_err\n";
    const auto saved = out.precision(17);
    for (const auto& row : rows) {
        out << row.solver << ',' << row.seed << ',' << row.iter << ','
            << row.f << ',' << row.l1 << ',' << row.gap << ','
            << row.elapsed_ms << ',' << row.rel_err << '\n';
    }
    out.precision(saved);
}

} // namespace lapbp
