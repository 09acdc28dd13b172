// finsler_cli: report, check, scan and verify for spherically symmetric Finsler metrics.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finsler/commands.hpp"

namespace {

using finsler::Setting;

// Flags that map one-to-one onto config keys.
struct SharedFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value config document")->check(CLI::ExistingFile);
    const std::vector<std::pair<std::string, std::string>> keys = {
        {"metric", "euclidean | riemann_quadratic | family | bryant | randers"},
        {"c", "bryant constant c (fractions like 1/3 accepted)"},
        {"c0", "c0(r) coefficients, ascending powers of r"},
        {"f1", "family f1(r) coefficients"},
        {"f2", "family f2(r) coefficients"},
        {"c1", "family c1(r) coefficients"},
        {"c2", "family c2(r) coefficients"},
        {"g", "family g_offset(r) coefficients"},
        {"domain", "bryant radial domain r_lo:r_hi"},
        {"n", "dimension (2..4)"},
        {"grid", "r_lo:r_hi:count, s_lo:s_hi:count, angles"},
        {"tol", "claim tolerance"},
        {"oracle", "off | semi | full"},
        {"h-rel", "relative finite-difference step"},
        {"check", "claims: landsberg, non-landsberg, flat, weak-landsberg, weak-berwald, non-berwald"},
        {"format", "json | csv"},
        {"out", "output file (default stdout)"},
        {"seed", "grid / battery seed"},
    };
    for (const auto& [key, help] : keys) {
      cmd->add_option_function<std::string>(
          "--" + key, [this, key = key](const std::string& v) { values[key] = v; }, help);
    }
  }

  // Same order every run, so later keys may rely on earlier ones (grid before seed).
  std::vector<Setting> overrides() const {
    static const std::vector<std::string> order = {"metric", "n",    "c",    "domain", "c0",     "f1",
                                                   "f2",     "c1",   "c2",   "g",      "grid",   "seed",
                                                   "tol",    "oracle", "h-rel", "check", "format", "out"};
    std::vector<Setting> out;
    for (const auto& key : order) {
      if (auto it = values.find(key); it != values.end()) {
        out.emplace_back(key == "h-rel" ? "h_rel" : key, it->second);
      }
    }
    return out;
  }

  finsler::RunConfig load() const {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw finsler::Error(finsler::ErrorCode::ParseError, "cannot read '" + config_path + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    return finsler::parse_config(text, overrides());
  }
};

finsler::Vector to_vector(const std::string& text, const std::string& field) {
  const std::vector<double> v = finsler::parse_list(text, field);
  return Eigen::Map<const finsler::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature of spherically symmetric Finsler metrics"};
  app.require_subcommand(1);

  SharedFlags report_flags, check_flags, scan_flags, verify_flags;
  std::string x_text, y_text, param;
  std::vector<std::string> value_texts;

  auto* report = app.add_subcommand("report", "every curvature quantity at one frame (x, y)");
  report_flags.attach(report);
  report->add_option("--x", x_text, "point, comma-separated")->required();
  report->add_option("--y", y_text, "direction, comma-separated")->required();

  auto* check = app.add_subcommand("check", "residuals and claims over a sampled grid");
  check_flags.attach(check);

  auto* scan = app.add_subcommand("scan", "aggregate residuals while sweeping one parameter");
  scan_flags.attach(scan);
  scan->add_option("--param", param, "c, or a coefficient such as f2[0]")->required();
  scan->add_option("--values", value_texts, "values to sweep")->delimiter(',')->expected(0, -1);

  auto* verify = app.add_subcommand("verify", "run the acceptance battery");
  verify_flags.attach(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return finsler::kExitInvalid;
  }

  try {
    if (report->parsed()) {
      const auto cfg = report_flags.load();
      return finsler::cmd_report(cfg, to_vector(x_text, "--x"), to_vector(y_text, "--y"), std::cout);
    }
    if (check->parsed()) return finsler::cmd_check(check_flags.load(), std::cout);
    if (scan->parsed()) {
      const auto cfg = scan_flags.load();
      std::vector<double> values;
      for (const auto& v : value_texts) {
        if (!v.empty()) values.push_back(finsler::parse_real(v, "--values"));
      }
      return finsler::cmd_scan(cfg, param, values, std::cout);
    }
    return finsler::cmd_verify(verify_flags.load(), std::cout);
  } catch (const finsler::Error& e) {
    std::cout << finsler::error_record(e).dump(2) << "\n";
    return finsler::kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return finsler::kExitInternal;
  }
}
