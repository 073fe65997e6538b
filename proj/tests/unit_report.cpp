#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "lapbp/bench.hpp"
#include "lapbp/oracle.hpp"
#include "lapbp/report.hpp"
#include "test_helpers.hpp"

using namespace lapbp;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string field;
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

BpInstance pair_instance() {
    Matrix A(1, 2);
    A << 1.0, 1.0;
    Vector b(1);
    b << 1.0;
    return BpInstance(A, b);
}

} // namespace

TEST_CASE("status names are stable") {
    CHECK(status_name(SolveStatus::GapReached) == "gap_reached");
    CHECK(status_name(SolveStatus::MaxIters) == "max_iters");
    CHECK(status_name(SolveStatus::Error) == "error");
}

TEST_CASE("trace CSV round-trips doubles through 17 significant digits") {
    std::vector<IterationRecord> trace = {
        {0, 1.0 / 3.0, 2.0 / 7.0, 1e-15, 0.125},
        {2, 3.5, 1.0000000000000002, 0.0, 1.5},
    };

    std::ostringstream out;
    write_trace_csv(out, trace);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "iter,f,l1,gap,elapsed_ms");

    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto fields = split_fields(lines[i + 1]);
        REQUIRE(fields.size() == 5);
        CHECK(std::stol(fields[0]) == trace[i].k);
        CHECK(std::stod(fields[1]) == trace[i].f);
        CHECK(std::stod(fields[2]) == trace[i].l1);
        CHECK(std::stod(fields[3]) == trace[i].gap);
        CHECK(std::stod(fields[4]) == trace[i].elapsed_ms);
    }
}

TEST_CASE("run report carries result, config echo, and instance summary") {
    const BpInstance inst = random_instance(6, 3, 0.5, 17);
    SolverConfig cfg;
    cfg.variant = Variant::Ags2;
    const ResolvedParams resolved = resolve_params(inst, cfg);
    const SolverRun run = solve(inst, cfg);
    REQUIRE(run.status == SolveStatus::GapReached);

    const nlohmann::json doc =
        run_report(inst, cfg, resolved, run, 17, "trace.csv");

    CHECK(doc.at("status") == "gap_reached");
    CHECK(doc.at("iters").get<long>() == run.iterations);
    CHECK(doc.at("l1").get<double>() ==
          doctest::Approx(run.final_s.lpNorm<1>()).epsilon(1e-15));
    CHECK(doc.at("f").get<double>() == run.final_f);
    CHECK(doc.at("gap").get<double>() == run.certificate.gap);
    REQUIRE(doc.at("s").size() == 6);
    CHECK(doc.at("s")[0].get<double>() == run.final_s[0]);

    const auto& echo = doc.at("config");
    CHECK(echo.at("solver") == "ags2");
    CHECK(echo.at("beta").get<double>() == 1.1);
    CHECK(echo.at("delta").get<double>() == 1e-15);
    CHECK(echo.at("max_iters").get<long>() == 100000);
    CHECK(echo.at("init") == "ls");
    CHECK(echo.at("seed").get<std::uint64_t>() == 17);

    CHECK(doc.at("instance").at("n").get<Index>() == 3);
    CHECK(doc.at("instance").at("m").get<Index>() == 6);
    CHECK(doc.at("instance").at("density").get<double>() ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(doc.at("trace_file") == "trace.csv");
    CHECK(!doc.contains("error"));
}

TEST_CASE("run report surfaces solver failures") {
    const BpInstance inst = pair_instance();
    SolverConfig cfg;
    cfg.check_condition = true;
    cfg.cond_limit = 0.5;
    const ResolvedParams resolved = resolve_params(inst, cfg);
    const SolverRun run = solve(inst, cfg);
    REQUIRE(run.status == SolveStatus::Error);

    const nlohmann::json doc = run_report(inst, cfg, resolved, run);
    CHECK(doc.at("status") == "error");
    CHECK(doc.at("error_kind") == "ill_conditioned");
    CHECK(!doc.at("error").get<std::string>().empty());
    CHECK(!doc.contains("trace_file"));
    CHECK(!doc.contains("seed"));
}

TEST_CASE("bench grid emits ordered rows with oracle-based errors") {
    BenchSpec spec;
    spec.m = 8;
    spec.n = 4;
    spec.density = 0.4;
    spec.seeds = 2;
    spec.seed_base = 5;
    spec.solvers = {Variant::Pgs, Variant::Ags2};

    const BenchResult result = run_bench(spec);
    REQUIRE(result.ok());
    REQUIRE(!result.rows.empty());

    // Rows appear grouped by seed, then by solver in spec order, with
    // strictly increasing iteration indices inside each group.
    std::size_t i = 0;
    for (std::uint64_t seed : {5, 6}) {
        const BpInstance inst = random_instance(8, 4, 0.4, seed);
        const double opt = brute_force_bp(inst).optimum_value;
        for (const char* solver : {"pgs", "ags2"}) {
            REQUIRE(i < result.rows.size());
            long last_iter = -1;
            double final_rel = 0.0;
            while (i < result.rows.size() &&
                   result.rows[i].solver == solver &&
                   result.rows[i].seed == seed) {
                const BenchRow& row = result.rows[i];
                CHECK(row.iter > last_iter);
                last_iter = row.iter;
                // rel_err is measured against the exhaustive optimum here.
                CHECK(row.rel_err ==
                      doctest::Approx((row.l1 - opt) / opt).epsilon(1e-12));
                CHECK(row.rel_err >= -1e-9);
                final_rel = row.rel_err;
                ++i;
            }
            CHECK(last_iter >= 0);   // group was nonempty
            CHECK(final_rel <= 1e-6); // last trace row is the converged one
        }
    }
    CHECK(i == result.rows.size());
}

TEST_CASE("bench reruns are deterministic apart from wall time") {
    BenchSpec spec;
    spec.m = 6;
    spec.n = 3;
    spec.density = 0.5;
    spec.seeds = 1;
    spec.seed_base = 3;
    spec.solvers = {Variant::Pgs};

    const BenchResult a = run_bench(spec);
    const BenchResult b = run_bench(spec);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].solver == b.rows[i].solver);
        CHECK(a.rows[i].seed == b.rows[i].seed);
        CHECK(a.rows[i].iter == b.rows[i].iter);
        CHECK(a.rows[i].f == b.rows[i].f);
        CHECK(a.rows[i].l1 == b.rows[i].l1);
        CHECK(a.rows[i].gap == b.rows[i].gap);
        CHECK(a.rows[i].rel_err == b.rows[i].rel_err);
    }
}

TEST_CASE("bench CSV has one line per row plus the header") {
    BenchSpec spec;
    spec.m = 6;
    spec.n = 3;
    spec.density = 0.5;
    spec.seeds = 1;
    spec.seed_base = 1;
    spec.solvers = {Variant::Ags2};

    const BenchResult result = run_bench(spec);
    REQUIRE(result.ok());

    std::ostringstream out;
    write_bench_csv(out, result.rows);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == result.rows.size() + 1);
    CHECK(lines[0] == "solver,seed,iter,f,l1,gap,elapsed_ms,rel_err");
    const auto first = split_fields(lines[1]);
    REQUIRE(first.size() == 8);
    CHECK(first[0] == "ags2");
    CHECK(first[1] == "1");
    CHECK(first[2] == "0");
}
