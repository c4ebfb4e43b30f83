#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wagner/commands.hpp"
#include "wagner/report.hpp"
#include "wagner/version.hpp"

namespace {

namespace fs = std::filesystem;

std::string error_json(const char* type, const std::string& message) {
  wagner::report::Value engine = wagner::report::Value::object();
  engine.set("name", wagner::report::Value::string(wagner::kEngineName));
  engine.set("version", wagner::report::Value::string(wagner::kEngineVersion));
  wagner::report::Value err = wagner::report::Value::object();
  err.set("type", wagner::report::Value::string(type));
  err.set("message", wagner::report::Value::string(message));
  wagner::report::Value root = wagner::report::Value::object();
  root.set("engine", std::move(engine));
  root.set("error", std::move(err));
  return root.serialize();
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
    return 1;
  }
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wagner: truncated metric connections, Wagner-type curvature and "
      "parallel transport for contact sub-Finsler structures"};
  app.set_version_flag("--version", wagner::kEngineVersion);
  app.require_subcommand(1);

  std::string manifest_path, out_path;
  bool force = false;
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check the chart (contact rank) and the energy "
                   "(homogeneity, positivity, convexity) over sample points"},
      {"eval", "evaluate connection and curvature tensors at manifest points"},
      {"brackets", "compare assembled curvature against finite-difference "
                   "Lie brackets of the frame fields"},
      {"scan", "classify the structure as flat or non-flat over a sample box"},
      {"transport", "parallel-transport vectors along manifest curves"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--manifest", manifest_path, "path to a JSON manifest")
        ->required();
    sub->add_flag("--force", force, "skip the validation gate");
    sub->add_option("--out", out_path,
                    "write the JSON report here instead of stdout "
                    "(CSV traces go to the same directory)");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  wagner::commands::CommandOutput output;
  try {
    const auto mf = wagner::manifest::load_manifest(manifest_path);
    if (cmd == "validate") {
      output = wagner::commands::cmd_validate(mf);
    } else if (cmd == "eval") {
      output = wagner::commands::cmd_eval(mf, force);
    } else if (cmd == "brackets") {
      output = wagner::commands::cmd_brackets(mf);
    } else if (cmd == "scan") {
      output = wagner::commands::cmd_scan(mf);
    } else {
      output = wagner::commands::cmd_transport(mf);
    }
  } catch (const wagner::ConfigError& e) {
    emit(error_json("config", e.what()), out_path);
    return 2;
  } catch (const std::exception& e) {
    emit(error_json("internal", e.what()), out_path);
    return 2;
  }

  if (emit(output.report_json, out_path) != 0) return 2;
  const fs::path dir =
      out_path.empty() ? fs::path(".") : fs::path(out_path).parent_path();
  for (const auto& [name, bytes] : output.csv_files) {
    const fs::path target = dir.empty() ? fs::path(name) : dir / name;
    std::ofstream csv(target, std::ios::binary);
    if (!csv) {
      std::fprintf(stderr, "cannot write %s\n", target.string().c_str());
      return 2;
    }
    csv << bytes;
    std::fprintf(stderr, "wrote %s\n", target.string().c_str());
  }
  return output.exit_code;
}
