#pragma once

// JSON and CSV serialization of parameters, configurations, results and run
// records. Angles are radians throughout.

#include "fcs/diagnostics.hpp"
#include "fcs/error.hpp"
#include "fcs/optimizer.hpp"
#include "fcs/parametrization.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fcs {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

namespace io {

using json = nlohmann::json;

/// Row-major nested array of [re, im] pairs.
inline json matrix_to_json(const CMatrix &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline CMatrix matrix_from_json(const json &j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw Error(ErrorKind::InvalidArgument, "matrix must be a nested array of [re, im] pairs");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw Error(ErrorKind::InvalidArgument, "matrix rows must have equal length");
        for (Eigen::Index k = 0; k < cols; ++k) {
            const json &e = row[static_cast<std::size_t>(k)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw Error(ErrorKind::InvalidArgument, "matrix entries must be [re, im] number pairs");
            m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

namespace detail {

inline std::vector<double> number_array(const json &j, const char *key, bool required) {
    if (!j.contains(key)) {
        if (required) throw Error(ErrorKind::InvalidArgument, std::string("missing field \"") + key + "\"");
        return {};
    }
    const json &a = j.at(key);
    if (!a.is_array()) throw Error(ErrorKind::InvalidArgument, std::string("field \"") + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto &x : a) {
        if (!x.is_number())
            throw Error(ErrorKind::InvalidArgument, std::string("field \"") + key + "\" must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace detail

inline json params_to_json(const ParameterVector &p) {
    json j{{"b", p.b}, {"alpha", p.alpha}, {"phi", p.phi}};
    if (!p.phase.empty()) j["phase"] = p.phase;
    if (!p.upper.empty()) j["upper"] = p.upper;
    return j;
}

/// Parses {"b", "alpha", "phi"[, "phase"][, "upper"]} and validates lengths.
inline ParameterVector params_from_json(const json &j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "parameter set must be a JSON object");
    if (!j.contains("b") || !j.at("b").is_number_integer())
        throw Error(ErrorKind::InvalidArgument, "field \"b\" must be an integer");
    ParameterVector p;
    p.b = j.at("b").get<int>();
    p.alpha = detail::number_array(j, "alpha", true);
    p.phi = detail::number_array(j, "phi", true);
    p.phase = detail::number_array(j, "phase", false);
    p.upper = detail::number_array(j, "upper", false);
    p.validate();
    return p;
}

/// Accepts a bare parameter set or any run record whose outputs (or inputs)
/// carry one under "params".
inline ParameterVector params_from_document(const json &j) {
    if (j.is_object() && j.contains("b")) return params_from_json(j);
    for (const char *section : {"outputs", "inputs"})
        if (j.is_object() && j.contains(section) && j.at(section).is_object() && j.at(section).contains("params"))
            return params_from_json(j.at(section).at("params"));
    throw Error(ErrorKind::InvalidArgument, "document contains no parameter set");
}

inline json config_to_json(const AnnealingConfig &c) {
    return json{{"nt", c.nt},
                {"ns", c.ns},
                {"rt", c.rt},
                {"neps", c.neps},
                {"eps", c.eps},
                {"t0", c.t0},
                {"max_evals", c.max_evals},
                {"seed", c.seed},
                {"initial_step", c.initial_step},
                {"complex_rotation", c.options.complex_rotation},
                {"non_nilpotent", c.options.non_nilpotent}};
}

/// Missing fields keep their defaults.
inline AnnealingConfig config_from_json(const json &j) {
    if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "annealing config must be a JSON object");
    AnnealingConfig c;
    try {
        c.nt = j.value("nt", c.nt);
        c.ns = j.value("ns", c.ns);
        c.rt = j.value("rt", c.rt);
        c.neps = j.value("neps", c.neps);
        c.eps = j.value("eps", c.eps);
        c.t0 = j.value("t0", c.t0);
        c.max_evals = j.value("max_evals", c.max_evals);
        c.seed = j.value("seed", c.seed);
        c.initial_step = j.value("initial_step", c.initial_step);
        c.options.complex_rotation = j.value("complex_rotation", false);
        c.options.non_nilpotent = j.value("non_nilpotent", false);
    } catch (const json::exception &e) {
        throw Error(ErrorKind::InvalidArgument, std::string("annealing config: ") + e.what());
    }
    c.validate();
    return c;
}

inline json complex_to_json(Complex z) { return json{z.real(), z.imag()}; }

inline json diagnostics_to_json(const StateDiagnostics &d, bool include_matrices = true) {
    json j{{"concurrence", d.concurrence},
           {"assistance", d.assistance},
           {"A", d.elements.A},
           {"B", complex_to_json(d.elements.B)},
           {"C", complex_to_json(d.elements.C)},
           {"purity12", d.purity12},
           {"purity1", d.purity1},
           {"purity123", d.purity123},
           {"bloch_length_sq", d.bloch_length_sq},
           {"next_nearest_concurrence", d.next_nearest_concurrence},
           {"next_nearest_assistance", d.next_nearest_assistance},
           {"unitality_residual", d.unitality_residual},
           {"fixed_point_residual", d.fixed_point_residual},
           {"nullspace_rank", d.nullspace_rank}};
    j["ellipse_residual"] = d.ellipse_residual ? json(*d.ellipse_residual) : json(nullptr);
    if (include_matrices) {
        j["rho_B"] = matrix_to_json(d.rho_b);
        j["rho12"] = matrix_to_json(d.rho12);
    }
    return j;
}

inline json trace_to_json(const std::vector<TracePoint> &trace) {
    json a = json::array();
    for (const auto &t : trace) a.push_back({t.eval, t.best});
    return a;
}

inline json result_to_json(const OptimizationResult &r) {
    json starts = json::array();
    for (const auto &s : r.starts) {
        json e{{"seed", s.seed}, {"ok", s.ok}, {"annealed", s.annealed}, {"refined", s.refined}, {"evals", s.evals}};
        if (!s.ok) e["error"] = s.error;
        starts.push_back(std::move(e));
    }
    return json{{"params", params_to_json(r.params)},
                {"concurrence", r.concurrence()},
                {"diagnostics", diagnostics_to_json(r.diagnostics)},
                {"evals", r.evals},
                {"converged", r.converged},
                {"stop", std::string(to_string(r.stop))},
                {"seed", r.seed},
                {"annealed_concurrence", r.annealed_concurrence},
                {"refine_iterations", r.refine_iterations},
                {"gradient_norm", std::isfinite(r.gradient_norm) ? json(r.gradient_norm) : json(nullptr)},
                {"starts", std::move(starts)},
                {"trace", trace_to_json(r.trace)}};
}

/// ISO-8601 UTC timestamp with second resolution.
inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct RunRecord {
    int schema_version = kSchemaVersion;
    std::string command;
    std::string tool_version{kToolVersion};
    std::string started_at;
    std::string finished_at;
    json inputs = json::object();
    json outputs = json::object();

    friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

inline json record_to_json(const RunRecord &r) {
    return json{{"schema_version", r.schema_version}, {"command", r.command},   {"tool_version", r.tool_version},
                {"started_at", r.started_at},         {"finished_at", r.finished_at}, {"inputs", r.inputs},
                {"outputs", r.outputs}};
}

inline RunRecord record_from_json(const json &j) {
    if (!j.is_object() || !j.contains("schema_version"))
        throw Error(ErrorKind::InvalidArgument, "run record lacks schema_version");
    try {
        RunRecord r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kSchemaVersion)
            throw Error(ErrorKind::InvalidArgument,
                        "unsupported schema_version " + std::to_string(r.schema_version));
        r.command = j.at("command").get<std::string>();
        r.tool_version = j.at("tool_version").get<std::string>();
        r.started_at = j.at("started_at").get<std::string>();
        r.finished_at = j.at("finished_at").get<std::string>();
        r.inputs = j.at("inputs");
        r.outputs = j.at("outputs");
        return r;
    } catch (const json::exception &e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed run record: ") + e.what());
    }
}

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorKind::InvalidArgument, std::string("invalid JSON: ") + e.what());
    }
}

inline json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

/// Writes text to path, replacing it. Throws InvalidArgument if unwritable.
inline void write_text_file(const std::string &path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidArgument, "failed writing " + path);
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// RFC-4180 CSV: CRLF line endings, fields quoted when they contain a comma,
/// quote or line break, embedded quotes doubled.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

    void row(const std::vector<std::string> &fields) {
        if (fields.size() != columns_) throw Error(ErrorKind::InvalidArgument, "CSV row has the wrong field count");
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << escape(fields[i]);
        }
        out_ << "\r\n";
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

    static std::string escape(const std::string &field) {
        if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
        std::string quoted = "\"";
        for (char c : field) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + '"';
    }

private:
    std::size_t columns_;
    std::ostringstream out_;
};

/// Parses RFC-4180 text into rows of fields (used to re-read our own output).
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            any = false;
        } else {
            field += c;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string trace_to_csv(const std::vector<TracePoint> &trace) {
    CsvWriter csv({"eval", "value"});
    for (const auto &t : trace) csv.row({std::to_string(t.eval), format_double(t.best)});
    return csv.str();
}

} // namespace io
} // namespace fcs
