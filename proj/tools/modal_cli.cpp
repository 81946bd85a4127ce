// Command-line front end: validate scenario files, run scenarios, classify scores.
//
// Exit codes: 0 clean, 1 alarm raised during a run, 2 invalid configuration
// (or missing scores for classify), 3 parse error or unreadable input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "modal/modal.h"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitAlarm = 1;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int fail(modal_status status) {
  std::cerr << "error: " << modal_status_name(status) << ": " << modal_last_error() << "\n";
  switch (status) {
    case MODAL_ERR_PARSE:
    case MODAL_ERR_IO: return kExitParse;
    default: return kExitConfig;
  }
}

int unreadable(const std::string& path) {
  std::cerr << "error: cannot read " << path << "\n";
  return kExitParse;
}

int cmd_validate(const std::string& path) {
  auto text = slurp(path);
  if (!text) return unreadable(path);
  modal_report* report = nullptr;
  if (modal_status s = modal_scenario_validate(text->c_str(), &report); s != MODAL_OK) return fail(s);
  for (size_t i = 0; i < modal_report_error_count(report); ++i) {
    std::cout << "error: " << modal_report_error(report, i) << "\n";
  }
  for (size_t i = 0; i < modal_report_warning_count(report); ++i) {
    std::cout << "warning: " << modal_report_warning(report, i) << "\n";
  }
  const bool ok = modal_report_ok(report);
  std::cout << (ok ? "valid" : "invalid") << " (" << modal_report_error_count(report) << " errors, "
            << modal_report_warning_count(report) << " warnings)\n";
  modal_report_free(report);
  return ok ? kExitClean : kExitConfig;
}

struct RunArgs {
  std::string path;
  std::optional<uint64_t> seed;
  std::optional<size_t> steps;
  std::string out;
  std::string format = "text-table";
};

int cmd_run(const RunArgs& args) {
  auto text = slurp(args.path);
  if (!text) return unreadable(args.path);
  modal_scenario* scenario = nullptr;
  if (modal_status s = modal_scenario_load(text->c_str(), &scenario); s != MODAL_OK) return fail(s);

  modal_run* run = nullptr;
  const modal_status s = modal_scenario_run(scenario, args.seed.has_value(), args.seed.value_or(0),
                                            args.steps.value_or(0), &run);
  modal_scenario_free(scenario);
  if (s != MODAL_OK) return fail(s);

  const auto format = args.format == "structured" ? MODAL_FORMAT_STRUCTURED : MODAL_FORMAT_TEXT_TABLE;
  const char* trace = modal_run_trace(run, format);
  std::ostream* summary_out = &std::cout;
  if (args.out.empty()) {
    std::cout << trace;
    summary_out = &std::cerr;
  } else {
    std::ofstream out(args.out, std::ios::binary);
    out << trace;
    if (!out) {
      std::cerr << "error: cannot write " << args.out << "\n";
      modal_run_free(run);
      return kExitParse;
    }
  }
  *summary_out << modal_run_summary(run);
  const bool alarmed = modal_run_alarm_count(run) > 0;
  modal_run_free(run);
  return alarmed ? kExitAlarm : kExitClean;
}

struct ClassifyArgs {
  std::string scores;
  std::string nerve;
  double p_low = 0.0;
  double p_high = 0.0;
};

int cmd_classify(const ClassifyArgs& args) {
  auto nerve_text = slurp(args.nerve);
  if (!nerve_text) return unreadable(args.nerve);
  auto scores_text = slurp(args.scores);
  if (!scores_text) return unreadable(args.scores);

  modal_nerve* nerve = nullptr;
  if (modal_status s = modal_nerve_parse(nerve_text->c_str(), &nerve); s != MODAL_OK) return fail(s);
  modal_outcome* outcome = nullptr;
  const modal_status s = modal_classify(nerve, scores_text->c_str(), args.p_low, args.p_high, &outcome);
  modal_nerve_free(nerve);
  if (s != MODAL_OK) return fail(s);

  const size_t n = modal_outcome_size(outcome);
  char value[64];
  switch (modal_outcome_kind_of(outcome)) {
    case MODAL_OUTCOME_POINT:
      std::cout << "Point";
      for (size_t i = 0; i < n; ++i) {
        std::snprintf(value, sizeof value, "%.12g", modal_outcome_value(outcome, i));
        std::cout << " " << modal_outcome_mode(outcome, i) << "=" << value;
      }
      std::cout << "\n";
      break;
    case MODAL_OUTCOME_PARTIALITY:
      std::cout << "Partiality";
      if (n > 0) {
        std::snprintf(value, sizeof value, "%.12g", modal_outcome_value(outcome, 0));
        std::cout << " best=" << modal_outcome_mode(outcome, 0) << " score=" << value;
      }
      std::cout << "\n";
      break;
    case MODAL_OUTCOME_CONTRADICTION:
      std::cout << "Contradiction {";
      for (size_t i = 0; i < n; ++i) std::cout << (i ? "," : "") << modal_outcome_mode(outcome, i);
      std::cout << "}\n";
      break;
  }
  modal_outcome_free(outcome);
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-mode supervision: nerve validation, scenario runs, score classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", modal_version());

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario or nerve file");
  validate->add_option("path", validate_path, "Scenario file")->required();

  RunArgs run_args;
  uint64_t seed = 0;
  size_t steps = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and write its trace");
  run->add_option("path", run_args.path, "Scenario file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  auto* steps_opt = run->add_option("--steps", steps, "Override the step count")->check(CLI::PositiveNumber);
  run->add_option("--out", run_args.out, "Trace file (default: standard output)");
  run->add_option("--format", run_args.format, "Trace format")
      ->check(CLI::IsMember({"text-table", "structured"}));

  ClassifyArgs classify_args;
  auto* classify = app.add_subcommand("classify", "Classify a score vector against a nerve");
  classify->add_option("--scores", classify_args.scores, "JSON object of mode scores")->required();
  classify->add_option("--nerve", classify_args.nerve, "Nerve declaration file")->required();
  classify->add_option("--p-low", classify_args.p_low, "Adequacy threshold")->required();
  classify->add_option("--p-high", classify_args.p_high, "Quality threshold")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  if (*validate) return cmd_validate(validate_path);
  if (*run) {
    if (*seed_opt) run_args.seed = seed;
    if (*steps_opt) run_args.steps = steps;
    return cmd_run(run_args);
  }
  return cmd_classify(classify_args);
}
