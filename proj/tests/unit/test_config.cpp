#include <doctest.h>

#include <filesystem>

#include "mrif/config.hpp"
#include "mrif/experiments.hpp"

using namespace mrif;
using namespace mrif::config;

namespace {

const char* kMinimal = R"({
  "name": "t", "seed": 4,
  "scenario": {"n_reports": 900, "outage_cells": [5]}
})";

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
    return e.what();
  }
  FAIL("config accepted");
  return {};
}

}  // namespace

TEST_CASE("minimal config takes defaults and the seed") {
  const auto c = parse_config(kMinimal);
  CHECK(c.name == "t");
  CHECK(c.scenario.rng_seed == 4);
  CHECK(c.train.seed == 4);
  CHECK(c.scenario.layout.sites.size() == 9);
  CHECK(c.scenario.outage_cells == std::vector<int>{5});
}

TEST_CASE("unknown keys and missing fields are named") {
  CHECK(error_of(R"({"name":"t","seed":1,"scenario":{"n_reports":9,"outage_cells":[],"n_ues":5,"bogus":1}})")
            .find("scenario.bogus") != std::string::npos);
  CHECK(error_of(R"({"name":"t","seed":1,"scenario":{"n_reports":9}})")
            .find("scenario.outage_cells") != std::string::npos);
  CHECK(error_of(R"({"seed":1,"scenario":{"n_reports":9,"outage_cells":[]}})").find("name") !=
        std::string::npos);
  CHECK(error_of(R"({"name":"t","seed":1,"scenario":{"n_reports":9,"outage_cells":[]},"train":{"composition":"xor"}})")
            .find("composition") != std::string::npos);
}

TEST_CASE("syntax errors carry a line") {
  try {
    parse_config("{\n\"name\": \"t\",\n  oops\n}");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("resolved config round trips") {
  const auto c = parse_config(kMinimal);
  const auto text = to_json(c);
  CHECK(to_json(parse_config(text)) == text);
}

TEST_CASE("rate ranges") {
  const auto r = parse_rate_range("0.05:0.90:0.05");
  CHECK(experiments::rate_range(r.start, r.stop, r.step).size() == 18);
  CHECK_THROWS_AS(parse_rate_range("0.1:0.2"), Error);
  CHECK_THROWS_AS(parse_rate_range("a:b:c"), Error);
  CHECK(experiments::severity_cells(2, std::vector<int>{5, 3, 7}) == std::vector<int>{5, 3});
}

TEST_CASE("shipped presets load") {
  for (const char* name : {"paper-baseline", "fig2-coc", "fig5c-grid", "fig5e-sweep"}) {
    const auto path = std::filesystem::path(MRIF_PRESET_DIR) / (std::string(name) + ".json");
    const auto c = load_config(path.string());
    CHECK(c.name == name);
    CHECK(to_json(parse_config(to_json(c))) == to_json(c));
  }
}
