#pragma once

#include <map>
#include <string>
#include <vector>

namespace wgt {

// One pass/fail line of a reproduction report.
struct CheckLine {
    bool passed = true;
    std::string text;
};

// Small numeric table written next to each reproduction (CSV, full-precision
// cells). Cell layout is row-major over `columns`.
struct ResultTable {
    std::string caption;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::string to_csv() const;
};

// Outcome of one bundled experiment: the pass/fail check lines, the scalar
// metrics behind them, and the artifact files written under the output
// directory.
struct ReproduceReport {
    std::string id;
    bool passed = true;
    std::vector<CheckLine> checks;
    std::vector<std::string> artifacts;
    std::map<std::string, double> metrics;

    [[nodiscard]] std::string to_text() const;
};

// Raw JSON text of the bundled experiment registry (shipped with the
// library; also installed as a data file).
[[nodiscard]] const char* registry_json_text();

// Sorted ids of the bundled experiments.
[[nodiscard]] std::vector<std::string> registry_ids();

// One-line description of a bundled experiment. Throws validation_error for
// an unknown id, listing the known ones.
[[nodiscard]] std::string registry_title(const std::string& id);

// Run one bundled experiment end to end: generate (or model) its data,
// invert, write datasets, tables and plots under out_dir/<id>/, and evaluate
// the bundled acceptance checks. `jobs` caps forward-solver parallelism;
// entries that are memory-bound pin it back to 1.
[[nodiscard]] ReproduceReport run_reproduction(const std::string& id, const std::string& out_dir,
                                               int jobs = 1);

}  // namespace wgt
