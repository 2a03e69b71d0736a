#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "gkforge/errors.hpp"
#include "gkforge/pipeline.hpp"

using namespace gkforge;
using namespace gkforge::pipeline;
using nlohmann::json;

namespace {

json half_space_doc() {
  return json::parse(R"({
    "k_plus": 1, "k_minus": null, "l_plus": 0, "l_minus": 0,
    "lambda": 1.0, "lambda0": 0.0,
    "poles": [{"mu1": 0.4, "mu_plus": 0.2, "mu_minus": 0.1}],
    "holonomy": 0.0, "z_quotient": null,
    "fd": {"order": 4, "step": 0.005}, "samples": 8, "seed": 3
  })");
}

json cone_doc() {
  json d = half_space_doc();
  d["k_minus"] = 1;
  d["lambda"] = 4.0;
  d["lambda0"] = 0.5;
  d["poles"] = json::parse(R"([{"mu1": 0.5, "mu_plus": 0.1, "mu_minus": -0.2}])");
  return d;
}

}  // namespace

TEST_CASE("config parses, echoes and rejects malformed documents") {
  const Config c = Config::from_json(half_space_doc());
  CHECK(c.k_plus == 1);
  CHECK_FALSE(c.k_minus.has_value());
  REQUIRE(c.poles.size() == 1);
  CHECK(c.poles[0].mu_plus == 0.2);
  CHECK(c.samples == 8);
  const Config again = Config::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());

  json bad = half_space_doc();
  bad["colour"] = 1;
  CHECK_THROWS_AS(Config::from_json(bad), ConfigError);
  bad = half_space_doc();
  bad["fd"]["order"] = 3;
  CHECK_THROWS_AS(Config::from_json(bad), ConfigError);
  bad = half_space_doc();
  bad["k_plus"] = 1.5;
  CHECK_THROWS_AS(Config::from_json(bad), ConfigError);
  bad = half_space_doc();
  bad["holonomy"] = 0.3;  // needs a Z-quotient
  CHECK_THROWS_AS(Config::from_json(bad), ConfigError);
  bad = half_space_doc();
  bad.erase("lambda");
  CHECK_THROWS_AS(Config::from_json(bad), ConfigError);
  bad = half_space_doc();
  bad["samples"] = 0;
  CHECK_THROWS_AS(Config::from_json(bad), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/config.json"), ConfigError);

  json tol = half_space_doc();
  tol["tolerances"] = {{"soliton_einstein", 2e-4}};
  CHECK(Config::from_json(tol).tolerance("soliton_einstein", 1e-4) == 2e-4);
  CHECK(Config::from_json(tol).tolerance("dH", 1e-6) == 1e-6);
}

TEST_CASE("construct enforces completeness and handles pole-free data") {
  json d = cone_doc();
  d["lambda"] = 0.0;
  CHECK_THROWS_AS(construct(Config::from_json(d)), CompletenessError);
  RunOptions lenient;
  lenient.allow_incomplete = true;
  CHECK_NOTHROW(construct(Config::from_json(d), lenient));

  json empty = half_space_doc();
  empty["poles"] = json::array();
  const Construction c = construct(Config::from_json(empty));
  const Report r = construct_report(c);
  CHECK(r.pass());
  CHECK(r.find("summary")->detail["W_range"][0].get<double>() > 0.0);
}

TEST_CASE("construct summary lists the normalized flux and the S(W) verdict") {
  const Report a = construct_report(construct(Config::from_json(half_space_doc())));
  const json flux = a.find("flux")->detail["poles"][0]["flux"];
  CHECK(flux[0].get<double>() == doctest::Approx(-2.0 * M_PI).epsilon(5e-3));
  CHECK(a.find("quantization")->detail["applicable"] == false);

  const Report b = flux_report(construct(Config::from_json(cone_doc())));
  CHECK(b.pass());
  CHECK(b.find("quantization")->detail["S"].get<double>() == doctest::Approx(-2.0).epsilon(1e-6));

  json mismatch = cone_doc();
  mismatch["k_minus"] = 2;
  mismatch["l_minus"] = 1;
  const Report m = flux_report(construct(Config::from_json(mismatch)));
  CHECK_FALSE(m.find("quantization")->pass);
  CHECK_FALSE(m.pass());
}

TEST_CASE("verify report is schema-versioned JSON with per-identity blocks") {
  const Report r = verify(construct(Config::from_json(cone_doc())));
  const json j = r.to_json();
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["tool"]["version"] == tool_version());
  CHECK(j["config"]["k_minus"] == 1);
  CHECK(j["wall_time_seconds"].get<double>() >= 0.0);
  for (const char* name : {"frame_identities", "w_equation", "d_beta", "flux", "quantization",
                           "soliton_einstein", "soliton_bianchi", "d_Omega_I", "nijenhuis_J",
                           "re_Omega_I_minus_re_Omega_J", "Omega_I_type", "pole_asymptotics"}) {
    CAPTURE(name);
    const Stage* s = r.find(name);
    REQUIRE(s != nullptr);
    CHECK(s->pass);
  }
  CHECK(j["pass"].get<bool>());
  CHECK(json::parse(j.dump()) == j);
}

TEST_CASE("verify with a finer step shows the order-consistent drop") {
  json d = cone_doc();
  d["samples"] = 4;
  d["fd"] = {{"order", 2}, {"step", 1e-2}};
  const double coarse = verify(construct(Config::from_json(d))).find("soliton_einstein")->detail["max"];
  d["fd"]["step"] = 5e-3;
  const double fine = verify(construct(Config::from_json(d))).find("soliton_einstein")->detail["max"];
  CAPTURE(coarse);
  CAPTURE(fine);
  CHECK(coarse / fine > 4 * 0.7);
}

TEST_CASE("export lattice: row count, header and parse-back") {
  const Construction c = construct(Config::from_json(half_space_doc()));
  std::ostringstream csv;
  export_lattice(c, {16, ExportFormat::Csv}, csv);
  std::istringstream in(csv.str());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  ++lines;
  CHECK(line.rfind("mu1,mu_plus,mu_minus,p,W,g_tt", 0) == 0);
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 4096 + 1);

  std::ostringstream js;
  export_lattice(c, {3, ExportFormat::Json}, js);
  const json doc = json::parse(js.str());
  CHECK(doc["metadata"]["columns"] == export_columns());
  REQUIRE(doc["rows"].size() == 27);
  for (const auto& row : doc["rows"]) {
    const MomentPoint x{row[0].get<double>(), row[1].get<double>(), row[2].get<double>()};
    // same code path, so bitwise equal
    CHECK(row[3].get<double>() == c.angle->angle_value(x));
    CHECK(row[4].get<double>() == c.w->value(x));
  }
  CHECK(doc["metadata"]["orientation"].get<std::string>().find("dt^dmu1") == 0);
}

TEST_CASE("named examples") {
  for (const auto& name : example_names()) {
    CAPTURE(name);
    const Report r = run_example(name, 6, 2);
    for (const auto& s : r.stages) {
      CAPTURE(s.name);
      CHECK(s.pass);
    }
  }
  CHECK_THROWS_AS(run_example("klein-bottle"), ConfigError);
}
