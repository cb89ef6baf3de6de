#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>

#include "wgt/dataset.hpp"
#include "wgt/errors.hpp"

using namespace wgt;

namespace {
constexpr double kPi = 3.14159265358979323846;

FrequencyDataset sample_dataset() {
    FrequencyDataset ds;
    ds.provenance = "born-model";
    ds.records = {
        {1, 4.0, 4.0 + std::sqrt(16.0 - kPi * kPi), cdouble(0.25, -0.125)},
        {0, 2.0, 4.0, cdouble(0.5, 1.0)},
        {0, 3.0, 6.0, cdouble(-0.125, 0.0625)},
        {1, 5.0, 5.0 + std::sqrt(25.0 - kPi * kPi), cdouble(1e-3, 2e-3)},
    };
    ds.sort();
    return ds;
}
}  // namespace

TEST_CASE("dataset sorts by mode then frequency and exposes per-mode views") {
    FrequencyDataset ds = sample_dataset();
    REQUIRE(ds.records[0].mode == 0);
    REQUIRE(ds.records[0].k == 2.0);
    REQUIRE(ds.records[1].k == 3.0);
    REQUIRE(ds.records[2].mode == 1);

    REQUIRE(ds.modes() == std::vector<int>{0, 1});
    const FrequencyDataset m0 = ds.select_mode(0);
    REQUIRE(m0.records.size() == 2);
    REQUIRE(m0.provenance == ds.provenance);
    REQUIRE(ds.omegas(0) == std::vector<double>{4.0, 6.0});
    REQUIRE(ds.values(0) == std::vector<cdouble>{cdouble(0.5, 1.0), cdouble(-0.125, 0.0625)});

    REQUIRE_NOTHROW(ds.validate());
}

TEST_CASE("dataset validation rejects malformed contents") {
    FrequencyDataset ds = sample_dataset();

    SECTION("unknown provenance") {
        ds.provenance = "hearsay";
        REQUIRE_THROWS_AS(ds.validate(), validation_error);
    }
    SECTION("non-increasing frequency within a mode") {
        ds.records[1].omega = ds.records[0].omega;
        REQUIRE_THROWS_AS(ds.validate(), validation_error);
    }
    SECTION("carrier below the modal cutoff") {
        ds.records[2].omega = kPi - 0.5;  // mode 1 requires omega > pi
        REQUIRE_THROWS_AS(ds.validate(), validation_error);
    }
    SECTION("non-finite value") {
        ds.records[0].value = cdouble(std::nan(""), 0.0);
        REQUIRE_THROWS_AS(ds.validate(), validation_error);
    }
}

TEST_CASE("JSON serialization is a byte-stable round trip") {
    const FrequencyDataset ds = sample_dataset();
    const std::string text = to_json_string(ds);
    const FrequencyDataset back = dataset_from_json_string(text);
    REQUIRE(back.provenance == ds.provenance);
    REQUIRE(back.records.size() == ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        REQUIRE(back.records[i].mode == ds.records[i].mode);
        REQUIRE(back.records[i].k == ds.records[i].k);
        REQUIRE(back.records[i].omega == ds.records[i].omega);
        REQUIRE(back.records[i].value == ds.records[i].value);
    }
    REQUIRE(to_json_string(back) == text);
}

TEST_CASE("CSV serialization is a byte-stable round trip") {
    const FrequencyDataset ds = sample_dataset();
    const std::string text = to_csv_string(ds);
    REQUIRE(text.find("mode") != std::string::npos);  // header row
    const FrequencyDataset back = dataset_from_csv_string(text);
    REQUIRE(back.records.size() == ds.records.size());
    REQUIRE(to_csv_string(back) == text);
    for (std::size_t i = 0; i < ds.records.size(); ++i)
        REQUIRE(back.records[i].value == ds.records[i].value);
}

TEST_CASE("file round trips dispatch on extension") {
    const FrequencyDataset ds = sample_dataset();
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "wgt-dataset-test";
    std::filesystem::create_directories(dir);

    const std::string js = (dir / "d.json").string();
    const std::string cs = (dir / "d.csv").string();
    save_dataset(ds, js);
    save_dataset(ds, cs);
    REQUIRE(to_json_string(load_dataset(js)) == to_json_string(ds));
    REQUIRE(to_csv_string(load_dataset(cs)) == to_csv_string(ds));

    REQUIRE_THROWS_AS(save_dataset(ds, (dir / "d.xml").string()), validation_error);
    REQUIRE_THROWS_AS(load_dataset((dir / "missing.json").string()), validation_error);

    std::filesystem::remove_all(dir);
}
