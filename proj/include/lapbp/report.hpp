#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "lapbp/solvers.hpp"

namespace lapbp {

/// "gap_reached", "max_iters", or "error".
std::string status_name(SolveStatus status);

/// Writes the trace as CSV with header `iter,f,l1,gap,elapsed_ms`.
void write_trace_csv(std::ostream& out,
                     const std::vector<IterationRecord>& trace);

/// Self-contained result document: {"status", "iters", "l1", "f", "gap",
/// "elapsed_ms", "s", "config", "instance", ...}.  The config echo carries
/// the resolved beta/delta/budget so the run can be repeated exactly.
nlohmann::json run_report(const BpInstance& inst, const SolverConfig& config,
                          const ResolvedParams& resolved, const SolverRun& run,
                          std::optional<std::uint64_t> seed = std::nullopt,
                          const std::string& trace_path = {});

} // namespace lapbp
