#include "lapbp/report.hpp"

#include <iomanip>
#include <ostream>

namespace lapbp {

namespace {

std::string init_name(InitRule rule) {
    switch (rule) {
        case InitRule::LeastSquares: return "ls";
        case InitRule::Ones: return "ones";
        case InitRule::Custom: return "custom";
    }
    return "unknown";
}

} // namespace

std::string status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::GapReached: return "gap_reached";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::Error: return "error";
    }
    return "unknown";
}

void write_trace_csv(std::ostream& out,
                     const std::vector<IterationRecord>& trace) {
    out << "iter,f,l1,gap,elapsed_ms\n";
    const auto saved = out.precision(17);
    for (const auto& row : trace) {
        out << row.k << ',' << row.f << ',' << row.l1 << ',' << row.gap << ','
            << row.elapsed_ms << '\n';
    }
    out.precision(saved);
}

nlohmann::json run_report(const BpInstance& inst, const SolverConfig& config,
                          const ResolvedParams& resolved, const SolverRun& run,
                          std::optional<std::uint64_t> seed,
                          const std::string& trace_path) {
    nlohmann::json doc;
    doc["status"] = status_name(run.status);
    doc["iters"] = run.iterations;
    doc["l1"] = run.final_s.size() > 0 ? run.final_s.lpNorm<1>() : 0.0;
    doc["f"] = run.final_f;
    doc["gap"] = run.certificate.gap;
    doc["elapsed_ms"] = run.elapsed_ms;

    nlohmann::json s = nlohmann::json::array();
    for (Index j = 0; j < run.final_s.size(); ++j) {
        s.push_back(run.final_s[j]);
    }
    doc["s"] = std::move(s);

    nlohmann::json cfg;
    cfg["solver"] = variant_name(config.variant);
    cfg["eps"] = config.eps;
    cfg["beta"] = resolved.beta;
    cfg["delta"] = resolved.delta;
    cfg["max_iters"] = resolved.max_iters;
    cfg["gap_tol"] = config.gap_tol;
    cfg["init"] = init_name(config.init);
    cfg["tau"] = config.tau;
    cfg["solve_tol"] = config.solve_tol;
    cfg["trace_every"] = config.trace_every;
    if (seed) cfg["seed"] = *seed;
    doc["config"] = std::move(cfg);

    nlohmann::json summary;
    summary["n"] = inst.rows();
    summary["m"] = inst.cols();
    if (inst.ground_truth()) {
        const Index nnz =
            (inst.ground_truth()->array().abs() > 0.0).count();
        summary["density"] =
            static_cast<double>(nnz) / static_cast<double>(inst.cols());
    }
    doc["instance"] = std::move(summary);

    if (!trace_path.empty()) doc["trace_file"] = trace_path;
    if (run.status == SolveStatus::Error) {
        doc["error"] = run.error_message;
        if (!run.error_kind.empty()) doc["error_kind"] = run.error_kind;
    }
    return doc;
}

} // namespace lapbp
