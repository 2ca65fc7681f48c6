#include "msflow/config.hpp"
#include "msflow/output.hpp"
#include "msflow/run.hpp"

#include "msflow/platform.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw msflow::ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& out,
            const std::vector<std::string>& overrides, const std::string& preset_dir, bool quiet) {
  std::optional<std::string> text;
  if (!config_path.empty()) text = read_file(config_path);
  std::optional<std::string> name;
  if (!preset.empty()) name = preset;
  if (!text && !name) {
    std::cerr << "error: give a config file or --preset\n";
    return 2;
  }
  msflow::RunConfig config = msflow::resolve_config(text, name, overrides, preset_dir);
  std::filesystem::path dir = out.empty() ? config.output.directory : out;

  msflow::RunOptions options;
  if (!quiet) options.log = &std::cerr;
  msflow::RunResult result = msflow::run(config, dir, options);
  if (!result.ok) {
    std::cerr << "error: " << result.error << '\n';
    return 1;
  }
  if (result.stability_violations > 0) {
    std::cerr << "stability estimate violated in " << result.stability_violations << " step(s)\n";
    return 3;
  }
  std::cout << dir.string() << '\n';
  return 0;
}

int cmd_verify(const std::string& dir) {
  msflow::VerifyReport report = msflow::verify_run(dir);
  std::cout << "rows " << report.rows << "\nviolations " << report.violations << "\ninconsistent "
            << report.inconsistent << "\nenergy_increases " << report.energy_increases
            << "\nmin_relative_slack " << msflow::format_number(report.min_relative_slack) << '\n';
  for (const auto& p : report.problems) std::cout << "problem: " << p << '\n';
  return report.ok() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  msflow::ensure_working_blas(argv);
  CLI::App app{"Multiphase anisotropic Mullins-Sekerka / Stefan flow solver"};
  app.require_subcommand(1);
  std::string preset_dir = msflow::default_preset_dir();
  app.add_option("--preset-dir", preset_dir, "Directory with preset files");

  auto* run = app.add_subcommand("run", "Run a simulation");
  std::string config_path, preset, out;
  std::vector<std::string> overrides;
  bool quiet = false;
  run->add_option("config", config_path, "JSON config file");
  run->add_option("-p,--preset", preset, "Preset name");
  run->add_option("-o,--out", out, "Output directory (default: output.directory)");
  run->add_option("-s,--set", overrides, "Override, e.g. time.T=0.5 or geometry.vertices_per_curve=64");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* presets = app.add_subcommand("presets", "List shipped presets");
  std::string show;
  presets->add_option("--show", show, "Print the resolved config of one preset");

  auto* verify = app.add_subcommand("verify", "Re-check the stability estimate of a finished run");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, preset, out, overrides, preset_dir, quiet);
    if (*presets) {
      if (!show.empty()) {
        std::cout << msflow::serialize_config(msflow::load_preset(show, preset_dir)) << '\n';
      } else {
        for (const auto& name : msflow::list_presets(preset_dir)) {
          std::cout << name << "  " << msflow::load_preset(name, preset_dir).description << '\n';
        }
      }
      return 0;
    }
    if (*verify) return cmd_verify(verify_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
