// qti: run temporal-imaging scenarios from the command line.
//
//   qti simulate <file> [--out DIR]
//   qti design   <file> [--out DIR]
//   qti sweep    <file> --param KEY --range A:B:N [--out DIR] [--threads T]
//
// Output directory: --out, else [output] dir in the scenario, else $QTI_OUT_DIR,
// else ./out.

#include "qti/error.hpp"
#include "qti/runner.hpp"
#include "qti/scenario.hpp"
#include "qti/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using qti::ErrorCategory;

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::ScenarioSyntax: return 3;
    case ErrorCategory::ScenarioSemantic: return 4;
    case ErrorCategory::InvalidArgument: return 5;
    case ErrorCategory::Degenerate: return 6;
    case ErrorCategory::CarrierMismatch: return 7;
    case ErrorCategory::GridOverflow: return 8;
    case ErrorCategory::InsufficientSupport: return 9;
    case ErrorCategory::PeakDetection: return 10;
    case ErrorCategory::Io: return 11;
  }
  return 1;
}

void report_error(const qti::Error& e) {
  nlohmann::ordered_json j;
  j["error"] = qti::category_name(e.category());
  j["message"] = e.what();
  if (const auto* s = dynamic_cast<const qti::ScenarioError*>(&e)) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& d : s->diagnostics())
      list.push_back({{"line", d.line}, {"column", d.column}, {"message", d.message}});
    j["diagnostics"] = std::move(list);
  }
  std::cerr << j.dump() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    qti::fail(ErrorCategory::Io, "cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string output_dir(const std::string& flag, const qti::Scenario& scenario) {
  if (!flag.empty())
    return flag;
  if (scenario.output_dir)
    return *scenario.output_dir;
  if (const char* env = std::getenv("QTI_OUT_DIR"); env && *env)
    return env;
  return "out";
}

struct Range {
  double a;
  double b;
  std::size_t n;
};

Range parse_range(const std::string& text) {
  auto bad = [&] { qti::fail(ErrorCategory::InvalidArgument, "--range must be A:B:N, got '" + text + "'"); };
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    bad();
  auto number = [&](std::string_view s, double& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size())
      bad();
  };
  Range r{};
  const std::string_view v(text);
  number(v.substr(0, c1), r.a);
  number(v.substr(c1 + 1, c2 - c1 - 1), r.b);
  double n = 0;
  number(v.substr(c2 + 1), n);
  if (n < 1 || n != static_cast<double>(static_cast<std::size_t>(n)))
    bad();
  r.n = static_cast<std::size_t>(n);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal imaging simulator and design calculator"};
  app.require_subcommand(1);

  std::string file, out, param, range;
  unsigned threads = 0;

  auto* simulate = app.add_subcommand("simulate", "Propagate the scenario input through its system");
  simulate->add_option("file", file, "Scenario file")->required();
  simulate->add_option("--out", out, "Output directory");

  auto* design = app.add_subcommand("design", "Dispersion and bandwidth requirements");
  design->add_option("file", file, "Scenario file")->required();
  design->add_option("--out", out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Vary one numeric scenario key");
  sweep->add_option("file", file, "Scenario file")->required();
  sweep->add_option("--param", param, "Key to vary, e.g. analysis.analyzer_phase")->required();
  sweep->add_option("--range", range, "A:B:N, N points over [A, B) in the key's canonical unit")->required();
  sweep->add_option("--out", out, "Output directory");
  sweep->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string text = read_file(file);
    const qti::RawDocument document = qti::parse_document(text);
    const qti::Scenario scenario = qti::build_scenario(document);
    const std::string dir = output_dir(out, scenario);

    if (simulate->parsed()) {
      const qti::SimulationResult result = qti::simulate(scenario);
      qti::ArtifactWriter writer(dir);
      qti::write_simulation(writer, result);
      writer.commit();
      std::cout << "wrote " << writer.written().size() << " files to " << dir << '\n';
      if (result.interference)
        std::cout << "visibility " << qti::format_number(result.interference->visibility) << '\n';
    } else if (design->parsed()) {
      if (!scenario.design)
        qti::fail(ErrorCategory::ScenarioSemantic, "design needs a [design] section");
      const std::string json = qti::design_json(qti::requirements(*scenario.design));
      qti::ArtifactWriter writer(dir);
      writer.write("design.json", json);
      writer.commit();
      std::cout << "wrote " << (std::filesystem::path(dir) / "design.json").string() << '\n';
    } else {
      const Range r = parse_range(range);
      const auto rows = qti::sweep(document, param, r.a, r.b, r.n, threads);
      const std::string csv = qti::sweep_csv(param, rows);
      qti::ArtifactWriter writer(dir);
      writer.write("sweep.csv", csv);
      writer.commit();
      std::cout << "wrote " << rows.size() << " rows to " << (std::filesystem::path(dir) / "sweep.csv").string()
                << '\n';
    }
  } catch (const qti::Error& e) {
    report_error(e);
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
