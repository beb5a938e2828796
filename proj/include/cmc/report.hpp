#pragma once

// Scenario reports: per-step records, JSON (lossless) and CSV emission.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cmc/errors.hpp"
#include "cmc/residuals.hpp"

namespace cmc {

inline constexpr const char* artifact_version = "0.1.0";
inline constexpr int report_format_version = 1;

struct StepRecord {
    int index = 0;
    std::string operation;
    std::map<std::string, std::string> parameters;
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::pair<std::string, std::string>> text;
    std::vector<EquationResidual> residuals;
    std::vector<std::pair<std::string, bool>> checks;
    std::string error;
    bool pass = false;

    void value(std::string name, double v) { values.emplace_back(std::move(name), v); }
    void note(std::string name, std::string v) { text.emplace_back(std::move(name), std::move(v)); }
    void check(std::string name, bool ok) { checks.emplace_back(std::move(name), ok); }
    void add(const ResidualReport& r) { residuals.insert(residuals.end(), r.entries.begin(), r.entries.end()); }

    double value_of(const std::string& name) const {
        for (const auto& [k, v] : values)
            if (k == name) return v;
        throw Error(ErrorKind::domain, "step " + std::to_string(index) + " has no value '" + name + "'");
    }
    bool check_of(const std::string& name) const {
        for (const auto& [k, v] : checks)
            if (k == name) return v;
        throw Error(ErrorKind::domain, "step " + std::to_string(index) + " has no check '" + name + "'");
    }

    void finalize() {
        pass = error.empty();
        for (const auto& r : residuals) pass = pass && r.pass;
        for (const auto& c : checks) pass = pass && c.second;
    }
};

struct VerificationReport {
    int format_version = report_format_version;
    std::string version = artifact_version;
    std::string scenario;
    std::vector<StepRecord> steps;

    /// Conjunction of step results; true for an empty scenario.
    bool pass() const {
        for (const auto& s : steps)
            if (!s.pass) return false;
        return true;
    }
};

namespace detail {

inline bool same_double(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

inline bool same_residual(const EquationResidual& a, const EquationResidual& b) {
    return a.equation_id == b.equation_id && same_double(a.max_residual, b.max_residual) &&
           same_double(a.rms_residual, b.rms_residual) && same_double(a.tolerance, b.tolerance) && a.pass == b.pass &&
           a.samples == b.samples;
}

}  // namespace detail

inline bool operator==(const StepRecord& a, const StepRecord& b) {
    if (a.index != b.index || a.operation != b.operation || a.parameters != b.parameters || a.text != b.text ||
        a.checks != b.checks || a.error != b.error || a.pass != b.pass || a.values.size() != b.values.size() ||
        a.residuals.size() != b.residuals.size())
        return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i].first != b.values[i].first || !detail::same_double(a.values[i].second, b.values[i].second))
            return false;
    for (std::size_t i = 0; i < a.residuals.size(); ++i)
        if (!detail::same_residual(a.residuals[i], b.residuals[i])) return false;
    return true;
}

inline bool operator==(const VerificationReport& a, const VerificationReport& b) {
    return a.format_version == b.format_version && a.version == b.version && a.scenario == b.scenario &&
           a.steps == b.steps;
}

// JSON has no NaN or infinity; those travel as strings.
namespace detail {

inline nlohmann::json encode_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double decode_double(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::parse, "bad number '" + s + "' in report");
}

}  // namespace detail

inline nlohmann::json to_json(const VerificationReport& r) {
    using nlohmann::json;
    json steps = json::array();
    for (const auto& s : r.steps) {
        json values = json::array(), text = json::array(), residuals = json::array(), checks = json::array();
        for (const auto& [k, v] : s.values) values.push_back({{"name", k}, {"value", detail::encode_double(v)}});
        for (const auto& [k, v] : s.text) text.push_back({{"name", k}, {"value", v}});
        for (const auto& [k, v] : s.checks) checks.push_back({{"name", k}, {"pass", v}});
        for (const auto& e : s.residuals)
            residuals.push_back({{"equation_id", e.equation_id},
                                 {"max_residual", detail::encode_double(e.max_residual)},
                                 {"rms_residual", detail::encode_double(e.rms_residual)},
                                 {"tolerance", detail::encode_double(e.tolerance)},
                                 {"pass", e.pass},
                                 {"samples", e.samples}});
        steps.push_back({{"index", s.index},
                         {"operation", s.operation},
                         {"parameters", s.parameters},
                         {"values", values},
                         {"text", text},
                         {"residuals", residuals},
                         {"checks", checks},
                         {"error", s.error},
                         {"pass", s.pass}});
    }
    return {{"format_version", r.format_version},
            {"artifact_version", r.version},
            {"scenario", r.scenario},
            {"pass", r.pass()},
            {"steps", steps}};
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
    try {
        VerificationReport r;
        r.format_version = j.at("format_version").get<int>();
        if (r.format_version != report_format_version)
            throw Error(ErrorKind::parse, "unsupported report format version " + std::to_string(r.format_version));
        r.version = j.at("artifact_version").get<std::string>();
        r.scenario = j.at("scenario").get<std::string>();
        for (const auto& js : j.at("steps")) {
            StepRecord s;
            s.index = js.at("index").get<int>();
            s.operation = js.at("operation").get<std::string>();
            s.parameters = js.at("parameters").get<std::map<std::string, std::string>>();
            for (const auto& v : js.at("values"))
                s.values.emplace_back(v.at("name").get<std::string>(), detail::decode_double(v.at("value")));
            for (const auto& v : js.at("text")) s.text.emplace_back(v.at("name").get<std::string>(), v.at("value").get<std::string>());
            for (const auto& v : js.at("checks")) s.checks.emplace_back(v.at("name").get<std::string>(), v.at("pass").get<bool>());
            for (const auto& v : js.at("residuals")) {
                EquationResidual e;
                e.equation_id = v.at("equation_id").get<std::string>();
                e.max_residual = detail::decode_double(v.at("max_residual"));
                e.rms_residual = detail::decode_double(v.at("rms_residual"));
                e.tolerance = detail::decode_double(v.at("tolerance"));
                e.pass = v.at("pass").get<bool>();
                e.samples = v.at("samples").get<std::size_t>();
                s.residuals.push_back(e);
            }
            s.error = js.at("error").get<std::string>();
            s.pass = js.at("pass").get<bool>();
            r.steps.push_back(std::move(s));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("malformed report: ") + e.what());
    }
}

inline std::string report_to_json_text(const VerificationReport& r) { return to_json(r).dump(2) + "\n"; }

inline VerificationReport parse_report_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("report is not valid JSON: ") + e.what());
    }
    return report_from_json(j);
}

namespace detail {
inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}
inline std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

/// One row per step.
inline std::string report_to_csv(const VerificationReport& r) {
    std::string out = "index,operation,pass,residual_count,max_residual,worst_equation,values,error\n";
    for (const auto& s : r.steps) {
        double worst = 0;
        std::string worst_id;
        for (const auto& e : s.residuals)
            if (worst_id.empty() || std::isnan(e.max_residual) || e.max_residual > worst) {
                worst = e.max_residual;
                worst_id = e.equation_id;
            }
        std::string values;
        for (const auto& [k, v] : s.values) {
            if (!values.empty()) values += ';';
            values += k + "=" + detail::g17(v);
        }
        out += std::to_string(s.index) + "," + detail::csv_quote(s.operation) + "," + (s.pass ? "true" : "false") + "," +
               std::to_string(s.residuals.size()) + "," + detail::g17(worst) + "," + detail::csv_quote(worst_id) + "," +
               detail::csv_quote(values) + "," + detail::csv_quote(s.error) + "\n";
    }
    return out;
}

enum class ReportFormat { structured, csv };

inline void emit_report(const VerificationReport& r, ReportFormat format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write report to " + path);
    out << (format == ReportFormat::structured ? report_to_json_text(r) : report_to_csv(r));
    if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

inline VerificationReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_report_json(ss.str());
}

}  // namespace cmc
