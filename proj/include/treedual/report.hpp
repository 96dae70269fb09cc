#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "treedual/scenario.hpp"
#include "treedual/verify.hpp"

namespace treedual {

// One solved point, as reported by the CLI.
struct SolveRecord {
    std::string kind;           // "primal", "dual", "w", "wtilde"
    std::vector<double> point;  // (x, q) or (y, r)
    double value = 0.0;
    std::string status;
};

// Everything a run emits.  Wall-clock timings appear in the text format
// only; the machine-readable formats are bit-identical across runs of the
// same input and policy.
struct RunReport {
    std::string command;
    std::string digest;
    std::uint64_t seed = 42;
    int vertex_count = 0;
    bool has_equivalent = false;
    bool L_open = false;
    std::vector<std::string> info;  // free-form lines (cone generators etc.)
    std::vector<Violation> violations;
    std::vector<SolveRecord> solves;
    std::vector<CheckRecord> checks;
    std::vector<std::pair<std::string, double>> timings;

    bool ok() const;
};

// format is "text", "json", or "csv" (see docs/report_schema.md).
std::string format_report(const RunReport& report, const std::string& format);

}  // namespace treedual
