#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "qsuff_cli/cli.hpp"

namespace qsuff::cli {

namespace {

struct Flags {
  std::string file;
  std::string t_grid;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool json_out = false;
  bool human = false;
  bool timings = false;
  std::string out;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("file", f.file, "Input file (a report for verify)")->required();
  sub->add_option("--t-grid", f.t_grid, "Comma-separated modular times, or \"default\"");
  sub->add_option("--seed", f.seed, "Seed for randomized steps (default: $QSUFF_SEED or built-in)");
  sub->add_option("--tol", f.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  auto* j = sub->add_flag("--json", f.json_out, "JSON report (default)");
  auto* h = sub->add_flag("--human", f.human, "Plain-text summary");
  j->excludes(h);
  sub->add_option("--out", f.out, "Write the report to this path (atomically)");
  sub->add_flag("--timings", f.timings, "Add a timings field to the report");
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty() || text == "default") return default_t_grid();
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ParseError("--t-grid", "not a number: \"" + item + "\"");
    grid.push_back(t);
  }
  if (grid.empty()) throw ParseError("--t-grid", "empty grid");
  return grid;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("QSUFF_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  const std::string s(env);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used, 0);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError("QSUFF_SEED", "not an unsigned integer: \"" + s + "\"");
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sufficiency of subalgebras and coarse-grainings for families of quantum states", "qsuff"};
  app.require_subcommand(1);
  Flags f;
  std::string command;

  const std::vector<std::pair<std::string, std::string>> simple{
      {"check-subalgebra", "Is the generated subalgebra sufficient for the states?"},
      {"check-channel", "Is the unital coarse-graining sufficient for the states?"},
      {"decompose", "Minimal sufficient subalgebra and block decomposition of the states"},
      {"ssa", "Strong subadditivity gap and equality structure of a tripartite state"},
      {"verify", "Re-validate a report"},
  };
  for (const auto& [name, help] : simple) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, f);
    sub->callback([&command, name = name] { command = name; });
  }
  CLI::App* expfam = app.add_subcommand("expfam", "Exponential families");
  expfam->require_subcommand(1);
  CLI::App* fit = expfam->add_subcommand("fit", "Moment matching: parameters for given means");
  add_common(fit, f);
  fit->callback([&command] { command = "expfam-fit"; });
  CLI::App* check = expfam->add_subcommand("check-sufficiency", "Sufficiency for the family");
  add_common(check, f);
  check->callback([&command] { command = "expfam-check"; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitParse;
  }

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    Settings settings;
    settings.t_grid = parse_grid(f.t_grid);
    settings.seed = f.seed ? *f.seed : default_seed();
    if (f.tol) settings.tol = *f.tol;
    const json input = load_json_file(f.file);
    outcome = execute(command, input, settings);
  } catch (const ParseError& e) {
    outcome.exit_code = kExitParse;
    outcome.report = {{"format_version", kFormatVersion},
                      {"command", command},
                      {"error", {{"kind", "parse"}, {"message", e.detail()}, {"pointer", e.where()}}},
                      {"exit_code", kExitParse}};
  }
  if (f.timings) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    outcome.report["timings"] = {{"total_seconds", secs}};
  }
  if (outcome.report.contains("error")) {
    const json& e = outcome.report["error"];
    err << "qsuff: " << e.value("kind", "error") << " error";
    if (e.contains("pointer")) err << " at " << e["pointer"].get<std::string>();
    err << ": " << e.value("message", "") << "\n";
  }

  const std::string text = f.human ? render_human(outcome.report) : outcome.report.dump(2) + "\n";
  if (f.out.empty()) {
    out << text;
  } else {
    try {
      write_atomically(f.out, text);
    } catch (const std::exception& e) {
      err << "qsuff: " << e.what() << "\n";
      return kExitFailure;
    }
  }
  return outcome.exit_code;
}

}  // namespace qsuff::cli
