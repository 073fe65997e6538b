#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "lapbp/instance_io.hpp"

// Target path injected by the build so the tests exercise the real binary.
#ifndef LAPBP_CLI_PATH
#error "LAPBP_CLI_PATH must point at the built CLI"
#endif

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "lapbp_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout_" + std::to_string(counter));
    const fs::path err = work_dir() / ("stderr_" + std::to_string(counter));
    ++counter;

    const std::string cmd = std::string(LAPBP_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());

    CliResult result;
    result.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

fs::path write_tiny_instance() {
    lapbp::Matrix A(1, 2);
    A << 1.0, 1.0;
    lapbp::Vector b(1);
    b << 1.0;
    const fs::path path = work_dir() / "tiny.json";
    lapbp::write_instance(lapbp::BpInstance(A, b), path.string());
    return path;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// Bench output with the wall-time column blanked, for determinism checks.
std::string strip_elapsed(const std::string& csv) {
    std::ostringstream rebuilt;
    for (const std::string& line : split_lines(csv)) {
        std::istringstream fields(line);
        std::string field;
        int idx = 0;
        while (std::getline(fields, field, ',')) {
            rebuilt << (idx == 6 ? std::string("-") : field) << ',';
            ++idx;
        }
        rebuilt << '\n';
    }
    return rebuilt.str();
}

} // namespace

TEST_CASE("top-level help succeeds") {
    const CliResult res = run_cli("--help");
    CHECK(res.code == 0);
    CHECK(res.out.find("solve") != std::string::npos);
    CHECK(res.out.find("bench") != std::string::npos);
    CHECK(res.out.find("gen") != std::string::npos);
}

TEST_CASE("missing subcommand fails") {
    CHECK(run_cli("").code == 1);
    CHECK(run_cli("frobnicate").code == 1);
}

TEST_CASE("gen writes an instance the library can read back") {
    const fs::path path = work_dir() / "generated.json";
    const CliResult res = run_cli("gen --m 6 --n 3 --density 0.5 --seed 4 "
                                  "--output " + path.string());
    REQUIRE(res.code == 0);

    const lapbp::BpInstance inst = lapbp::read_instance(path.string());
    CHECK(inst.rows() == 3);
    CHECK(inst.cols() == 6);
    REQUIRE(inst.ground_truth().has_value());
    CHECK((inst.matrix() * *inst.ground_truth() - inst.rhs()).norm() <=
          1e-12 * inst.rhs().norm());

    // Same seed, same instance: the emitted file is reproducible.
    const fs::path again = work_dir() / "generated_again.json";
    REQUIRE(run_cli("gen --m 6 --n 3 --density 0.5 --seed 4 --output " +
                    again.string()).code == 0);
    CHECK(slurp(path) == slurp(again));
}

TEST_CASE("solve certifies the two-column tie from a JSON file") {
    const fs::path input = write_tiny_instance();
    const CliResult res =
        run_cli("solve --input " + input.string() +
                " --solver pgs --beta 3.5 --delta 1e-15 --gap-tol 1e-8");
    REQUIRE(res.code == 0);

    const nlohmann::json doc = nlohmann::json::parse(res.out);
    CHECK(doc.at("status") == "gap_reached");
    CHECK(std::abs(doc.at("l1").get<double>() - 1.0) <= 2e-8);
    CHECK(doc.at("s").size() == 2);
    CHECK(doc.at("config").at("solver") == "pgs");
    CHECK(doc.at("config").at("beta").get<double>() == 3.5);
    CHECK(doc.at("config").at("delta").get<double>() == 1e-15);
}

TEST_CASE("solve --output routes the report to a file") {
    const fs::path input = write_tiny_instance();
    const fs::path report = work_dir() / "report.json";
    const CliResult res = run_cli("solve --input " + input.string() +
                                  " --output " + report.string());
    REQUIRE(res.code == 0);
    CHECK(res.out.empty());
    const nlohmann::json doc = nlohmann::json::parse(slurp(report));
    CHECK(doc.at("status") == "gap_reached");
}

TEST_CASE("a dimension mismatch in the input is a labeled failure") {
    const fs::path bad = work_dir() / "bad.json";
    std::ofstream(bad) << R"({"n":2,"m":2,"A":[[1,0],[0,1]],"b":[1]})";
    const CliResult res = run_cli("solve --input " + bad.string());
    CHECK(res.code == 1);
    CHECK(res.err.find("DimensionMismatch") != std::string::npos);
}

TEST_CASE("a missing input file is a labeled failure") {
    const CliResult res =
        run_cli("solve --input " + (work_dir() / "nope.json").string());
    CHECK(res.code == 1);
    CHECK(res.err.find("error") != std::string::npos);
}

TEST_CASE("an unknown solver name fails parsing") {
    const fs::path input = write_tiny_instance();
    const CliResult res =
        run_cli("solve --input " + input.string() + " --solver bogus");
    CHECK(res.code == 1);
}

TEST_CASE("budget exhaustion exits 2 with the complete trace") {
    const fs::path input = work_dir() / "budget.json";
    REQUIRE(run_cli("gen --m 6 --n 3 --density 0.5 --seed 11 --output " +
                    input.string()).code == 0);

    const fs::path trace = work_dir() / "trace.csv";
    const CliResult res =
        run_cli("solve --input " + input.string() +
                " --solver ags2 --max-iters 5 --gap-tol 0 --trace " +
                trace.string());
    REQUIRE(res.code == 2);

    const nlohmann::json doc = nlohmann::json::parse(res.out);
    CHECK(doc.at("status") == "max_iters");
    CHECK(doc.at("iters").get<long>() == 5);
    CHECK(doc.at("trace_file") == trace.string());

    const auto lines = split_lines(slurp(trace));
    REQUIRE(lines.size() == 6); // header + five iterations
    CHECK(lines[0] == "iter,f,l1,gap,elapsed_ms");
    long previous = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const long iter = std::stol(lines[i].substr(0, lines[i].find(',')));
        CHECK(iter > previous);
        previous = iter;
    }
}

TEST_CASE("theoretical parameter sentinels are accepted on the command line") {
    const fs::path input = write_tiny_instance();
    const CliResult res =
        run_cli("solve --input " + input.string() +
                " --eps 0.5 --beta theoretical --delta theoretical");
    REQUIRE(res.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(res.out);
    CHECK(doc.at("config").at("beta").get<double>() == 128.0);
    CHECK(doc.at("config").at("delta").get<double>() ==
          doctest::Approx(0.5 * std::sqrt(0.5) / 4.0).epsilon(1e-14));
}

TEST_CASE("bench writes a deterministic CSV grid") {
    const fs::path csv_a = work_dir() / "bench_a.csv";
    const fs::path csv_b = work_dir() / "bench_b.csv";
    const std::string args =
        "bench --m 6 --n 3 --density 0.5 --seeds 2 --seed-base 1 "
        "--solvers pgs,ags2 --output ";
    REQUIRE(run_cli(args + csv_a.string()).code == 0);
    REQUIRE(run_cli(args + csv_b.string()).code == 0);

    const auto lines = split_lines(slurp(csv_a));
    REQUIRE(lines.size() >= 3);
    CHECK(lines[0] == "solver,seed,iter,f,l1,gap,elapsed_ms,rel_err");
    CHECK(lines[1].rfind("pgs,1,0,", 0) == 0);

    CHECK(strip_elapsed(slurp(csv_a)) == strip_elapsed(slurp(csv_b)));
}

TEST_CASE("bench rejects an empty solver list") {
    CHECK(run_cli("bench --m 6 --n 3 --seeds 1 --solvers ,").code == 1);
}
