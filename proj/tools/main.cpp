#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw chainrec::cli::ConfigError("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw chainrec::cli::ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chain recurrence of weighted backward shifts on trees"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, csv_path, mode;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  for (const char* name : {"verify-constructions", "certify", "classify", "oracle"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
    sub->add_option("--out", out_path, "JSON report path (default: stdout)");
    sub->add_option("--csv", csv_path, "Flattened CSV table path");
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--mode", mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto* sub = app.get_subcommands().front();
  chainrec::cli::RunOptions opt;
  opt.jobs = jobs;
  if (sub->count("--mode")) opt.mode = mode;
  if (sub->count("--seed")) opt.seed = seed;
  try {
    auto scenario = chainrec::cli::parse_scenario(read_file(scenario_path));
    auto report = chainrec::cli::run_command(sub->get_name(), std::move(scenario), opt);
    const std::string json = report.json.dump(2) + "\n";
    if (out_path.empty())
      std::cout << json;
    else
      write_file(out_path, json);
    if (!csv_path.empty()) write_file(csv_path, report.csv());
    if (!report.ok) std::cerr << "one or more checks failed\n";
    return report.ok ? 0 : 1;
  } catch (const chainrec::cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
