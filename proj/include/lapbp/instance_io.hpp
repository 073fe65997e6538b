#pragma once

#include <filesystem>
#include <iosfwd>

#include "lapbp/instance.hpp"

namespace lapbp {

/// Reads an instance from `path`.
///
/// - `.json`: object {"n": int, "m": int, "A": [[row-major reals]],
///   "b": [reals], "ground_truth": [reals] (optional)}.
/// - `.mtx`: Matrix Market (coordinate or array, real, general) holding A;
///   b is read from a side file with the extension replaced by ".b"
///   (one real per line), or from `rhs_path` when given.
///
/// Throws ParseError on malformed input; validation errors propagate.
BpInstance read_instance(const std::filesystem::path& path,
                         const std::filesystem::path& rhs_path = {});

/// Writes an instance as JSON (the same schema read_instance accepts).
/// Doubles survive a write/read round trip bit for bit.
void write_instance(const BpInstance& inst, const std::filesystem::path& path);

/// Stream-level variants used by the file helpers above.
BpInstance read_instance_json(std::istream& in);
void write_instance_json(const BpInstance& inst, std::ostream& out);
Matrix read_matrix_market(std::istream& in);

} // namespace lapbp
