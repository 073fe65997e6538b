// Command-line frontend: solve one instance, run the convergence benchmark
// grid, or generate random instances.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lapbp/bench.hpp"
#include "lapbp/instance_io.hpp"
#include "lapbp/oracle.hpp"
#include "lapbp/report.hpp"

namespace {

using namespace lapbp;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;

ParamSpec parse_param(const std::string& text, const char* flag) {
    if (text.empty()) return {};
    if (text == "theoretical") return ParamSpec::theoretical();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return ParamSpec::of(v);
    } catch (const std::exception&) {
        throw CLI::ValidationError(
            flag, "expected a number or \"theoretical\", got \"" + text + "\"");
    }
}

Variant parse_variant(const std::string& name) {
    if (name == "pgs") return Variant::Pgs;
    if (name == "ags") return Variant::Ags;
    if (name == "ags2") return Variant::Ags2;
    throw CLI::ValidationError("--solver",
                               "expected pgs, ags, or ags2, got \"" + name +
                                   "\"");
}

// Options shared by `solve` and `bench`.
struct CommonFlags {
    double eps = 0.25;
    std::string beta, delta, max_iters;
    double gap_tol = 1e-8;
    std::string init = "ls";
    double tau = 1e-15;
    double solve_tol = 1e-12;
    long trace_every = 1;
    bool check_condition = false;
    int threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--eps", eps,
                        "Accuracy target used by the theoretical parameter "
                        "rules (in (0,1))");
        cmd->add_option("--beta", beta,
                        "Step-size parameter, or \"theoretical\"");
        cmd->add_option("--delta", delta,
                        "Weight floor, or \"theoretical\"");
        cmd->add_option("--max-iters", max_iters,
                        "Iteration budget, or \"theoretical\"");
        cmd->add_option("--gap-tol", gap_tol,
                        "Stop when gap <= gap_tol * ||s||_1");
        cmd->add_option("--init", init, "Starting point: ls or ones")
            ->check(CLI::IsMember({"ls", "ones"}));
        cmd->add_option("--tau", tau, "AGS2 constant mixing weight");
        cmd->add_option("--solve-tol", solve_tol,
                        "Relative residual target of the inner linear solves");
        cmd->add_option("--trace-every", trace_every,
                        "Record every k-th iteration in the trace");
        cmd->add_flag("--check-condition", check_condition,
                      "Fail inner solves above the conditioning limit");
        cmd->add_option("--threads", threads,
                        "Worker threads for the kernels (0 = library default)");
    }

    SolverConfig to_config(Variant variant) const {
        SolverConfig config;
        config.variant = variant;
        config.eps = eps;
        config.beta = parse_param(beta, "--beta");
        config.delta = parse_param(delta, "--delta");
        config.max_iters = parse_param(max_iters, "--max-iters");
        config.gap_tol = gap_tol;
        config.init = init == "ones" ? InitRule::Ones : InitRule::LeastSquares;
        config.tau = tau;
        config.solve_tol = solve_tol;
        config.trace_every = trace_every;
        config.check_condition = check_condition;
        return config;
    }

    void apply_threads() const {
#ifdef _OPENMP
        if (threads > 0) omp_set_num_threads(threads);
#endif
    }
};

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open " + path + " for writing");
    }
    out << contents;
}

int cmd_solve(const std::string& input, const std::string& rhs,
              const CommonFlags& flags, const std::string& solver,
              const std::string& trace_path, const std::string& output,
              std::optional<std::uint64_t> seed) {
    flags.apply_threads();
    const BpInstance inst = read_instance(input, rhs);
    SolverConfig config = flags.to_config(parse_variant(solver));

    SolverRun run;
    ResolvedParams resolved{};
    // The conditioning diagnostic is advisory: retry on a larger floor
    // rather than giving up outright.
    for (int attempt = 0;; ++attempt) {
        resolved = resolve_params(inst, config);
        run = solve(inst, config);
        if (run.status == SolveStatus::Error &&
            run.error_kind == "ill_conditioned" && attempt < 3) {
            const double wider = resolved.delta * 1e3;
            std::cerr << "warning: inner solve ill-conditioned at floor "
                      << resolved.delta << "; retrying with " << wider << "\n";
            config.delta = ParamSpec::of(wider);
            continue;
        }
        break;
    }

    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) {
            throw ParseError("cannot open " + trace_path + " for writing");
        }
        write_trace_csv(out, run.trace);
    }

    const nlohmann::json doc =
        run_report(inst, config, resolved, run, seed, trace_path);
    if (output.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        write_text_file(output, doc.dump(2) + "\n");
    }

    switch (run.status) {
        case SolveStatus::GapReached: return kExitOk;
        case SolveStatus::MaxIters: return kExitBudget;
        case SolveStatus::Error: break;
    }
    std::cerr << "error: " << run.error_message << '\n';
    return kExitError;
}

int cmd_bench(Index m, Index n, double density, long seeds,
              std::uint64_t seed_base, const std::string& solvers,
              const CommonFlags& flags, const std::string& output) {
    flags.apply_threads();
    BenchSpec spec;
    spec.m = m;
    spec.n = n;
    spec.density = density;
    spec.seeds = seeds;
    spec.seed_base = seed_base;
    spec.solvers.clear();
    std::stringstream names(solvers);
    std::string name;
    while (std::getline(names, name, ',')) {
        if (!name.empty()) spec.solvers.push_back(parse_variant(name));
    }
    if (spec.solvers.empty()) {
        throw CLI::ValidationError("--solvers", "no solver names given");
    }
    spec.base_config = flags.to_config(spec.solvers.front());

    const BenchResult result = run_bench(spec);
    if (output.empty()) {
        write_bench_csv(std::cout, result.rows);
    } else {
        std::ofstream out(output);
        if (!out) {
            throw ParseError("cannot open " + output + " for writing");
        }
        write_bench_csv(out, result.rows);
    }
    for (const auto& message : result.errors) {
        std::cerr << "error: " << message << '\n';
    }
    return result.ok() ? kExitOk : kExitError;
}

int cmd_gen(Index m, Index n, double density, std::uint64_t seed,
            const std::string& output) {
    const BpInstance inst = random_instance(m, n, density, seed);
    if (output.empty()) {
        write_instance_json(inst, std::cout);
    } else {
        write_instance(inst, output);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lapbp: l1-norm minimization (basis pursuit) by iteratively "
        "reweighted Laplacian solves"};
    app.require_subcommand(1);

    // solve ------------------------------------------------------------------
    auto* solve_cmd =
        app.add_subcommand("solve", "Solve one instance read from a file");
    std::string input, rhs, solver = "pgs", trace_path, output;
    std::optional<std::uint64_t> seed;
    CommonFlags solve_flags;
    solve_cmd->add_option("--input", input, "Instance file (.json or .mtx)")
        ->required();
    solve_cmd->add_option(
        "--rhs", rhs,
        "Right-hand-side file for .mtx input (default: input with .b)");
    solve_cmd->add_option("--solver", solver, "pgs, ags, or ags2");
    solve_cmd->add_option("--trace", trace_path, "Write per-iteration CSV here");
    solve_cmd->add_option("--output", output,
                          "Write the result JSON here (default: stdout)");
    solve_cmd->add_option("--seed", seed,
                          "Seed to echo into the report for reproducibility");
    solve_flags.attach(solve_cmd);

    // bench ------------------------------------------------------------------
    auto* bench_cmd = app.add_subcommand(
        "bench", "Convergence benchmark over random instances");
    Index bench_m = 100, bench_n = 80;
    double bench_density = 0.2;
    long bench_seeds = 20;
    std::uint64_t bench_seed_base = 1;
    std::string bench_solvers = "pgs,ags,ags2", bench_output;
    CommonFlags bench_flags;
    bench_cmd->add_option("--m", bench_m, "Columns of A");
    bench_cmd->add_option("--n", bench_n, "Rows of A");
    bench_cmd->add_option("--density", bench_density,
                          "Planted-solution density in (0,1]");
    bench_cmd->add_option("--seeds", bench_seeds, "Number of seeds");
    bench_cmd->add_option("--seed-base", bench_seed_base, "First seed value");
    bench_cmd->add_option("--solvers", bench_solvers,
                          "Comma-separated list from {pgs, ags, ags2}");
    bench_cmd->add_option("--output", bench_output,
                          "Write the long-format CSV here (default: stdout)");
    bench_flags.attach(bench_cmd);

    // gen --------------------------------------------------------------------
    auto* gen_cmd =
        app.add_subcommand("gen", "Generate a random instance as JSON");
    Index gen_m = 10, gen_n = 5;
    double gen_density = 0.5;
    std::uint64_t gen_seed = 1;
    std::string gen_output;
    gen_cmd->add_option("--m", gen_m, "Columns of A");
    gen_cmd->add_option("--n", gen_n, "Rows of A");
    gen_cmd->add_option("--density", gen_density,
                        "Planted-solution density in (0,1]");
    gen_cmd->add_option("--seed", gen_seed, "PRNG seed");
    gen_cmd->add_option("--output", gen_output,
                        "Write the instance here (default: stdout)");

    try {
        app.parse(argc, argv);
        if (solve_cmd->parsed()) {
            return cmd_solve(input, rhs, solve_flags, solver, trace_path,
                             output, seed);
        }
        if (bench_cmd->parsed()) {
            return cmd_bench(bench_m, bench_n, bench_density, bench_seeds,
                             bench_seed_base, bench_solvers, bench_flags,
                             bench_output);
        }
        if (gen_cmd->parsed()) {
            return cmd_gen(gen_m, gen_n, gen_density, gen_seed, gen_output);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    } catch (const lapbp::Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}
