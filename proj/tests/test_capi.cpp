#include <doctest.h>

#include <cstring>
#include <string>

#include "modal/modal.h"

namespace {

const char* kCarPortfolio = R"({"vertices": ["alpha","beta","gamma","delta","epsilon","zeta","theta","phi"],
  "simplices": [["alpha","beta","gamma"],["alpha","delta"],["gamma","delta"],["delta","epsilon"],
                ["epsilon","zeta"],["epsilon","theta"],["zeta","theta"],["theta","phi"]]})";

const char* kAlarm = R"({"scenario": "custom", "steps": 3,
  "nerve": {"simplices": [["a","b"]]},
  "transitions": [{"from": "a", "to": "b"}, {"from": "b", "to": "a"}],
  "params": {"schedule": [{"from_step": 0, "scores": {"a": 0, "b": 0}}]}})";

}  // namespace

TEST_CASE("nerve handle") {
  modal_nerve* n = nullptr;
  REQUIRE(modal_nerve_parse(kCarPortfolio, &n) == MODAL_OK);
  CHECK(modal_nerve_vertex_count(n) == 8);
  CHECK(modal_nerve_simplex_count(n, 1) == 10);

  const char* bd[] = {"beta", "delta"};
  int is = -1;
  REQUIRE(modal_nerve_is_simplex(n, bd, 2, &is) == MODAL_OK);
  CHECK(is == 0);

  long d = 0;
  REQUIRE(modal_nerve_edge_distance(n, "alpha", "phi", &d) == MODAL_OK);
  CHECK(d == 4);
  CHECK(modal_nerve_edge_distance(n, "alpha", "nope", &d) == MODAL_ERR_UNKNOWN_MODE);
  CHECK(std::strlen(modal_last_error()) > 0);
  modal_nerve_free(n);

  CHECK(modal_nerve_parse("{", &n) == MODAL_ERR_PARSE);
  CHECK(modal_nerve_parse(nullptr, &n) == MODAL_ERR_INVALID_ARGUMENT);
  CHECK(modal_nerve_parse(R"({"simplices": [["a","a"]]})", &n) == MODAL_ERR_CONFIG);
}

TEST_CASE("classification through the C boundary") {
  modal_nerve* n = nullptr;
  REQUIRE(modal_nerve_parse(kCarPortfolio, &n) == MODAL_OK);
  modal_outcome* o = nullptr;
  const char* contradiction =
      R"({"alpha":0,"beta":0.6,"gamma":0,"delta":0.6,"epsilon":0,"zeta":0,"theta":0,"phi":0})";
  REQUIRE(modal_classify(n, contradiction, 0.2, 0.9, &o) == MODAL_OK);
  CHECK(modal_outcome_kind_of(o) == MODAL_OUTCOME_CONTRADICTION);
  REQUIRE(modal_outcome_size(o) == 2);
  CHECK(std::string(modal_outcome_mode(o, 0)) == "beta");
  CHECK(std::string(modal_outcome_mode(o, 1)) == "delta");
  CHECK(modal_outcome_mode(o, 2) == nullptr);
  modal_outcome_free(o);

  const char* point = R"({"alpha":0.7,"beta":0.5,"gamma":0,"delta":0,"epsilon":0,"zeta":0,"theta":0,"phi":0})";
  REQUIRE(modal_classify(n, point, 0.2, 0.9, &o) == MODAL_OK);
  CHECK(modal_outcome_kind_of(o) == MODAL_OUTCOME_POINT);
  CHECK(modal_outcome_value(o, 0) == doctest::Approx(0.625));
  CHECK(modal_outcome_value(o, 1) == doctest::Approx(0.375));
  modal_outcome_free(o);

  CHECK(modal_classify(n, R"({"alpha":0.7})", 0.2, 0.9, &o) == MODAL_ERR_MISSING_SCORE);
  CHECK(modal_classify(n, point, 0.9, 0.2, &o) == MODAL_ERR_CONFIG);
  modal_nerve_free(n);
}

TEST_CASE("scenario validation, load and run") {
  modal_report* r = nullptr;
  REQUIRE(modal_scenario_validate(R"({"scenario": "chicane", "oops": 1})", &r) == MODAL_OK);
  CHECK_FALSE(modal_report_ok(r));
  CHECK(modal_report_error_count(r) == 1);
  CHECK(std::string(modal_report_error(r, 0)).find("oops") != std::string::npos);
  modal_report_free(r);
  CHECK(modal_scenario_validate("[", &r) == MODAL_ERR_PARSE);

  modal_scenario* s = nullptr;
  CHECK(modal_scenario_load(R"({"scenario": "chicane", "oops": 1})", &s) == MODAL_ERR_CONFIG);
  REQUIRE(modal_scenario_load(kAlarm, &s) == MODAL_OK);
  CHECK(std::string(modal_scenario_kind(s)) == "custom");

  modal_run* run = nullptr;
  REQUIRE(modal_scenario_run(s, 1, 5, 0, &run) == MODAL_OK);
  CHECK(modal_run_alarm_count(run) > 0);
  const std::string structured = modal_run_trace(run, MODAL_FORMAT_STRUCTURED);
  CHECK(structured.rfind("{\"schema\":\"modal-trace\"", 0) == 0);
  CHECK(modal_run_trace(run, MODAL_FORMAT_STRUCTURED) == modal_run_trace(run, MODAL_FORMAT_STRUCTURED));
  CHECK(std::string(modal_run_summary(run)).find("alarm") != std::string::npos);
  modal_run_free(run);
  modal_scenario_free(s);
}

TEST_CASE("assessment and solar evaluation") {
  int consistent = -1, accurate = -1;
  REQUIRE(modal_assess(23.1, 23.2, 23.4, 23.5, 1.0, &consistent, &accurate) == MODAL_OK);
  CHECK(consistent == 0);
  CHECK(accurate == 1);
  CHECK(modal_assess(1.0, 0.0, 0.0, 1.0, 1.0, &consistent, &accurate) == MODAL_ERR_INVALID_ARGUMENT);

  double out[4];
  modal_solar_eval(0.8, 0.2, out);
  CHECK(out[1] == doctest::Approx(0.64));
  CHECK(std::string(modal_status_name(MODAL_ERR_IO)) == "i/o error");
  CHECK(std::string(modal_version()).size() > 0);
}
