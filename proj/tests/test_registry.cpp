#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "wgt/errors.hpp"
#include "wgt/registry.hpp"

using namespace wgt;

TEST_CASE("registry lists the bundled experiments in sorted order") {
    const std::vector<std::string> ids = registry_ids();
    REQUIRE(std::is_sorted(ids.begin(), ids.end()));
    const std::vector<std::string> expected = {
        "fig-bend-recon", "fig-bends-double", "fig-bump-recon",  "fig-condnum",
        "fig-error-slope", "fig-inhom-large", "fig-inhom-modes", "fig-inhom-small",
        "fig-lowgap",      "fig-recon-highband", "fig-support",  "tab-bend",
        "tab-bump"};
    REQUIRE(ids == expected);

    for (const std::string& id : ids) REQUIRE_FALSE(registry_title(id).empty());

    REQUIRE_THROWS_WITH(registry_title("no-such-entry"),
                        Catch::Matchers::ContainsSubstring("no-such-entry") &&
                            Catch::Matchers::ContainsSubstring("tab-bend"));
}

TEST_CASE("registry JSON text parses and covers every id") {
    const std::string text = registry_json_text();
    REQUIRE(!text.empty());
    for (const std::string& id : registry_ids())
        REQUIRE(text.find("\"" + id + "\"") != std::string::npos);
}

TEST_CASE("result tables serialize to full-precision CSV") {
    ResultTable t;
    t.caption = "demo table";
    t.columns = {"a", "b"};
    t.rows = {{1.0, 0.1}, {2.5, -3.0}};
    const std::string csv = t.to_csv();
    REQUIRE(csv ==
            "# demo table\n"
            "a,b\n"
            "1,0.10000000000000001\n"
            "2.5,-3\n");
}

TEST_CASE("report text carries the verdict and one line per check") {
    ReproduceReport rep;
    rep.id = "demo";
    rep.passed = false;
    rep.checks.push_back({true, "first thing holds"});
    rep.checks.push_back({false, "second thing is off"});
    rep.metrics["gap"] = 0.25;
    rep.artifacts.push_back("demo/data.json");

    const std::string text = rep.to_text();
    REQUIRE(text.find("[PASS] first thing holds") != std::string::npos);
    REQUIRE(text.find("[FAIL] second thing is off") != std::string::npos);
    REQUIRE(text.find("FAIL") < text.find("first thing"));  // verdict header on top
    REQUIRE(text.find("gap") != std::string::npos);
    REQUIRE(text.find("demo/data.json") != std::string::npos);
}
