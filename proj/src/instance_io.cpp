#include "lapbp/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace lapbp {

namespace {

using nlohmann::json;

Vector vector_from_json(const json& arr, const char* what) {
    if (!arr.is_array()) {
        throw ParseError(std::string("instance json: ") + what +
                         " must be an array");
    }
    Vector v(static_cast<Index>(arr.size()));
    Index i = 0;
    for (const auto& entry : arr) {
        if (!entry.is_number()) {
            throw ParseError(std::string("instance json: ") + what +
                             " must contain numbers only");
        }
        v[i++] = entry.get<double>();
    }
    return v;
}

BpInstance instance_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("instance json: top level must be an object");
    }
    for (const char* key : {"n", "m", "A", "b"}) {
        if (!doc.contains(key)) {
            throw ParseError(std::string("instance json: missing key \"") +
                             key + "\"");
        }
    }
    if (!doc["n"].is_number_integer() || !doc["m"].is_number_integer()) {
        throw ParseError("instance json: n and m must be integers");
    }
    const Index n = doc["n"].get<Index>();
    const Index m = doc["m"].get<Index>();
    if (n <= 0 || m <= 0) {
        throw ParseError("instance json: n and m must be positive");
    }

    const json& rows = doc["A"];
    if (!rows.is_array() || static_cast<Index>(rows.size()) != n) {
        std::ostringstream msg;
        msg << "instance json: A must be an array of " << n << " rows";
        throw ParseError(msg.str());
    }
    Matrix A(n, m);
    for (Index i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != m) {
            std::ostringstream msg;
            msg << "instance json: row " << i << " of A must have " << m
                << " entries";
            throw ParseError(msg.str());
        }
        for (Index j = 0; j < m; ++j) {
            const json& entry = row[static_cast<std::size_t>(j)];
            if (!entry.is_number()) {
                throw ParseError("instance json: A must contain numbers only");
            }
            A(i, j) = entry.get<double>();
        }
    }

    Vector b = vector_from_json(doc["b"], "b");
    std::optional<Vector> truth;
    if (doc.contains("ground_truth") && !doc["ground_truth"].is_null()) {
        truth = vector_from_json(doc["ground_truth"], "ground_truth");
    }
    return BpInstance(std::move(A), std::move(b), std::move(truth));
}

Vector read_rhs_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open right-hand-side file " + path.string());
    }
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        double v;
        if (ls >> v) {
            values.push_back(v);
            std::string trailing;
            if (ls >> trailing) {
                throw ParseError("right-hand-side file " + path.string() +
                                 ": expected one real per line");
            }
        } else if (!line.empty() && line.find_first_not_of(" \t\r") !=
                                        std::string::npos) {
            throw ParseError("right-hand-side file " + path.string() +
                             ": unparsable line \"" + line + "\"");
        }
    }
    if (values.empty()) {
        throw ParseError("right-hand-side file " + path.string() + " is empty");
    }
    return Eigen::Map<const Vector>(values.data(),
                                    static_cast<Index>(values.size()));
}

} // namespace

Matrix read_matrix_market(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw ParseError("matrix market: empty input");
    }
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix") {
        throw ParseError("matrix market: bad banner line");
    }
    if (field != "real" || symmetry != "general") {
        throw ParseError(
            "matrix market: only \"real general\" matrices are supported");
    }
    const bool coordinate = format == "coordinate";
    if (!coordinate && format != "array") {
        throw ParseError("matrix market: format must be coordinate or array");
    }

    std::string line;
    auto next_data_line = [&in, &line]() -> bool {
        while (std::getline(in, line)) {
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '%') continue;
            return true;
        }
        return false;
    };

    if (!next_data_line()) {
        throw ParseError("matrix market: missing size line");
    }
    std::istringstream ss(line);
    Index rows = 0, cols = 0;
    long entries = 0;
    if (coordinate) {
        if (!(ss >> rows >> cols >> entries)) {
            throw ParseError("matrix market: bad size line");
        }
    } else {
        if (!(ss >> rows >> cols)) {
            throw ParseError("matrix market: bad size line");
        }
    }
    if (rows <= 0 || cols <= 0) {
        throw ParseError("matrix market: dimensions must be positive");
    }

    Matrix A = Matrix::Zero(rows, cols);
    if (coordinate) {
        for (long k = 0; k < entries; ++k) {
            if (!next_data_line()) {
                throw ParseError("matrix market: fewer entries than declared");
            }
            std::istringstream es(line);
            Index i = 0, j = 0;
            double v = 0.0;
            if (!(es >> i >> j >> v)) {
                throw ParseError("matrix market: bad entry \"" + line + "\"");
            }
            if (i < 1 || i > rows || j < 1 || j > cols) {
                throw ParseError("matrix market: entry index out of range");
            }
            A(i - 1, j - 1) = v;
        }
    } else {
        // Array format lists all entries in column-major order.
        for (Index j = 0; j < cols; ++j) {
            for (Index i = 0; i < rows; ++i) {
                if (!next_data_line()) {
                    throw ParseError(
                        "matrix market: fewer entries than declared");
                }
                std::istringstream es(line);
                double v = 0.0;
                if (!(es >> v)) {
                    throw ParseError("matrix market: bad entry \"" + line +
                                     "\"");
                }
                A(i, j) = v;
            }
        }
    }
    return A;
}

BpInstance read_instance_json(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("instance json: ") + e.what());
    }
    return instance_from_json(doc);
}

BpInstance read_instance(const std::filesystem::path& path,
                         const std::filesystem::path& rhs_path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open instance file " + path.string());
    }
    const std::string ext = path.extension().string();
    if (ext == ".mtx") {
        Matrix A = read_matrix_market(in);
        std::filesystem::path side = rhs_path;
        if (side.empty()) {
            side = path;
            side.replace_extension(".b");
        }
        Vector b = read_rhs_file(side);
        return BpInstance(std::move(A), std::move(b));
    }
    return read_instance_json(in);
}

void write_instance_json(const BpInstance& inst, std::ostream& out) {
    json doc;
    doc["n"] = inst.rows();
    doc["m"] = inst.cols();
    json rows = json::array();
    for (Index i = 0; i < inst.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < inst.cols(); ++j) {
            row.push_back(inst.matrix()(i, j));
        }
        rows.push_back(std::move(row));
    }
    doc["A"] = std::move(rows);
    json b = json::array();
    for (Index i = 0; i < inst.rows(); ++i) {
        b.push_back(inst.rhs()[i]);
    }
    doc["b"] = std::move(b);
    if (inst.ground_truth()) {
        json t = json::array();
        for (Index j = 0; j < inst.cols(); ++j) {
            t.push_back((*inst.ground_truth())[j]);
        }
        doc["ground_truth"] = std::move(t);
    }
    out << doc.dump(2) << '\n';
}

void write_instance(const BpInstance& inst,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open " + path.string() + " for writing");
    }
    write_instance_json(inst, out);
}

} // namespace lapbp
