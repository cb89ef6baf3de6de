#pragma once

#include <string>
#include <vector>

#include "wgt/modal.hpp"

namespace wgt {

// One scattered-field measurement: transverse mode index, excitation
// wavenumber k, the data-model spatial frequency omega (e.g. 2k for mode 0,
// k + k_n for mode n), and the complex datum.
struct FrequencyRecord {
    int mode = 0;
    double k = 0.0;
    double omega = 0.0;
    cdouble value{0.0, 0.0};
};

// Measurement collection consumed by the inversion pipelines.
// provenance is one of "fdfd", "born-model", "external".
struct FrequencyDataset {
    std::vector<FrequencyRecord> records;
    std::string provenance = "external";

    // Sort by (mode, omega); required before validate/serialization.
    void sort();
    // Checks provenance tag, per-mode strictly increasing omegas, every omega
    // above the mode cutoff n*pi, and finite values. Throws validation_error.
    void validate() const;

    [[nodiscard]] std::vector<int> modes() const;
    [[nodiscard]] FrequencyDataset select_mode(int n) const;
    [[nodiscard]] std::vector<double> omegas(int mode) const;
    [[nodiscard]] std::vector<cdouble> values(int mode) const;
};

[[nodiscard]] std::string to_json_string(const FrequencyDataset& d, int indent = 2);
[[nodiscard]] FrequencyDataset dataset_from_json_string(const std::string& text);
[[nodiscard]] std::string to_csv_string(const FrequencyDataset& d);
[[nodiscard]] FrequencyDataset dataset_from_csv_string(const std::string& text);

// Extension-dispatched file IO (.json / .csv).
void save_dataset(const FrequencyDataset& d, const std::string& path);
[[nodiscard]] FrequencyDataset load_dataset(const std::string& path);

// Plain text-file helpers shared across the library.
[[nodiscard]] std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wgt
