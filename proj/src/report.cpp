#include "treedual/report.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "treedual/errors.hpp"

namespace treedual {
namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

nlohmann::json num_json(double v) {
    if (std::isfinite(v)) return v;
    return num(v);  // JSON has no infinities; encode as strings
}

std::string join(const std::vector<double>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << num(v[i]);
    return os.str();
}

std::string to_text(const RunReport& r) {
    std::ostringstream os;
    os << "command: " << r.command << "\n";
    os << "scenario digest: " << r.digest << "\n";
    os << "seed: " << r.seed << "\n";
    if (r.vertex_count > 0)
        os << "polytope: " << r.vertex_count << " vertices, equivalent measure "
           << (r.has_equivalent ? "exists" : "missing") << ", dual cone "
           << (r.L_open ? "full-dimensional" : "degenerate") << "\n";
    for (const auto& line : r.info) os << "info: " << line << "\n";
    for (const auto& v : r.violations)
        os << "violation [" << v.rule << "] at node " << v.node << ": "
           << v.detail << "\n";
    for (const auto& s : r.solves)
        os << s.kind << " at (" << join(s.point) << "): value " << num(s.value)
           << " status " << s.status << "\n";
    for (const auto& c : r.checks)
        os << "check " << c.name << ": " << (c.pass ? "pass" : "FAIL")
           << " (worst residual " << num(c.worst_residual) << ", tolerance "
           << num(c.tolerance) << ", probes " << c.probes << ")"
           << (c.note.empty() ? "" : " -- " + c.note) << "\n";
    for (const auto& t : r.timings)
        os << "timing " << t.first << ": " << t.second << " s\n";
    os << "verdict: " << (r.ok() ? "ok" : "fail") << "\n";
    return os.str();
}

std::string to_json(const RunReport& r) {
    nlohmann::json doc;
    doc["command"] = r.command;
    doc["digest"] = r.digest;
    doc["seed"] = r.seed;
    doc["polytope"] = {{"vertices", r.vertex_count},
                       {"has_equivalent", r.has_equivalent},
                       {"L_open", r.L_open}};
    doc["info"] = r.info;
    doc["violations"] = nlohmann::json::array();
    for (const auto& v : r.violations)
        doc["violations"].push_back(
            {{"rule", v.rule}, {"node", v.node}, {"detail", v.detail}});
    doc["solves"] = nlohmann::json::array();
    for (const auto& s : r.solves)
        doc["solves"].push_back({{"kind", s.kind},
                                 {"point", s.point},
                                 {"value", num_json(s.value)},
                                 {"status", s.status}});
    doc["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks)
        doc["checks"].push_back({{"name", c.name},
                                 {"statement", c.statement},
                                 {"probes", c.probes},
                                 {"worst_residual", num_json(c.worst_residual)},
                                 {"tolerance", c.tolerance},
                                 {"pass", c.pass},
                                 {"note", c.note}});
    doc["ok"] = r.ok();
    return doc.dump(2);
}

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

std::string to_csv(const RunReport& r) {
    std::ostringstream os;
    os << "record,name,point,value,residual,tolerance,pass,detail\n";
    os << "meta,digest,,,,,," << csv_escape(r.digest) << "\n";
    os << "meta,vertices,," << r.vertex_count << ",,,,\n";
    for (const auto& line : r.info)
        os << "info,,,,,,," << csv_escape(line) << "\n";
    for (const auto& v : r.violations)
        os << "violation," << csv_escape(v.rule) << "," << v.node << ",,,,false,"
           << csv_escape(v.detail) << "\n";
    for (const auto& s : r.solves)
        os << "solve," << csv_escape(s.kind) << "," << csv_escape(join(s.point))
           << "," << num(s.value) << ",,,," << csv_escape(s.status) << "\n";
    for (const auto& c : r.checks)
        os << "check," << csv_escape(c.name) << ",," << ","
           << num(c.worst_residual) << "," << num(c.tolerance) << ","
           << (c.pass ? "true" : "false") << "," << csv_escape(c.note) << "\n";
    return os.str();
}

}  // namespace

bool RunReport::ok() const {
    if (!violations.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string format_report(const RunReport& report, const std::string& format) {
    if (format == "text") return to_text(report);
    if (format == "json") return to_json(report);
    if (format == "csv") return to_csv(report);
    throw ParseError("unknown report format: " + format);
}

}  // namespace treedual
