#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wgt/dataset.hpp"
#include "wgt/defects.hpp"
#include "wgt/fdfd.hpp"
#include "wgt/recover.hpp"

namespace wgt {

// Excitation-frequency grid: `count` uniformly spaced k values on
// [min, max] including both endpoints, with values inside a cutoff guard
// band |k - n pi| <= guard removed (n >= 0: the static cutoff at k = 0
// counts, so the band effectively starts at max(min, guard)).
struct FrequencyGridRule {
    double min = 0.01;
    double max = 40.0;
    int count = 100;
    double guard = 0.2;

    void validate() const;
    [[nodiscard]] std::vector<double> raw_points() const;  // before guard removal
    [[nodiscard]] std::vector<double> points() const;      // guard-filtered
};

// Data-generation geometry around a defect: the computational window is the
// defect's x-support padded by `margin` on both sides; the measurement
// section sits `measure_offset` left of the support.
struct DiscretizationRule {
    double dy = 0.01;
    BoundaryClosure closure = BoundaryClosure::modal;
    double margin = 1.0;
    double measure_offset = 0.5;
    double dispersion_budget = 0.1;
    double pml_width = 4.0;  // only used with the pml closure
    double dx = 0.01;        // base step when auto refinement is off
    bool auto_refine_dx = true;

    void validate() const;
};

struct InversionSettings {
    RegularizationConfig reg;
    std::optional<SupportWindow> window;  // required for profile/map recovery
    int modes = 0;                        // highest transverse mode (index map)
    int n_bends = 1;

    void validate() const;
};

struct ExperimentConfig {
    std::string id = "experiment";
    std::optional<DefectDescriptor> defect;  // nullopt: empty guide
    FrequencyGridRule frequencies;
    DiscretizationRule discretization;
    InversionSettings inversion;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    std::string provenance = "fdfd";  // "fdfd" | "born-model"
    double noise = 0.0;               // relative complex-Gaussian noise level

    void validate() const;
};

// Strict JSON (de)serialization: unknown keys are rejected with the full
// field path; all optional fields are written back with their effective
// values, keys sorted.
[[nodiscard]] ExperimentConfig config_from_json_string(const std::string& text);
[[nodiscard]] std::string to_json_string(const ExperimentConfig& c, int indent = 2);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

// Concrete solver geometry derived from a config.
struct ForwardPlan {
    DiscretizationConfig fdfd;
    double measure_x = 0.0;
    int n_modes = 1;  // modes carried by the defect's data model
};
[[nodiscard]] ForwardPlan plan_forward(const ExperimentConfig& c);

// Dataset generation honoring provenance, seed, and noise. The k grid is
// split into independent solve tasks capped by `jobs`; results are merged,
// sorted, and (deterministically) perturbed, so the output does not depend
// on the job count.
[[nodiscard]] FrequencyDataset generate_dataset(const ExperimentConfig& c, int jobs = 1);

}  // namespace wgt
