#pragma once

/**
 * @file commands.hpp
 * @brief The report, check, scan and verify subcommands.
 *
 * Each command builds its document first and then writes it to `cfg.out` (or
 * the given stream when `out` is empty). Exit codes are a stable contract:
 * 0 pass, 1 check failure, 2 invalid frame or configuration, 3 internal error.
 *
 * Check CSV columns, in order:
 *
 *     r, s, u, angle_index, res_weak_berwald, res_weak_landsberg,
 *     res_landsberg_surface, res_flat_flag, valid
 *
 * Numbers are written in shortest round-trip form; rejected frames carry
 * `nan` residuals and valid = 0.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/battery.hpp"
#include "finsler/config.hpp"

namespace finsler {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitInvalid = 2, kExitInternal = 3 };

using Json = nlohmann::ordered_json;

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

/// {"schema_version", "error": {"code", "message"}}.
Json error_record(const Error& e);

/// The full pack for one frame. Throws SingularFrame on an invalid frame.
Json report_document(const RunConfig& cfg, const Vector& x, const Vector& y);

struct CheckOutcome {
  Json summary;
  std::string csv;
  bool pass = false;
};

/// Residuals over the sampled grid and the verdict on every claim in
/// cfg.checks. Throws EmptyGridAfterGuards if no frame survives the guards.
CheckOutcome run_check(const RunConfig& cfg);

/// `parameter` is "c" or a coefficient "c0[k]", "f1[k]", "f2[k]", "c1[k]",
/// "c2[k]", "g[k]" (k = power of r; "f2" alone means f2[0]).
/// Frames where the metric degenerates (bryant at c = 0 or 1, for instance)
/// still report spray residuals; `metric_frames` counts the others.
/// Throws ValidationError on an unknown parameter or an empty value list.
std::string run_scan(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values);

struct VerifyOutcome {
  Json document;
  std::vector<CriterionResult> results;
  bool pass = false;
};

/// The acceptance battery. Without an explicit oracle mode both semi and full
/// criteria run; `off` drops the oracle measurements.
VerifyOutcome run_verify(const RunConfig& cfg);

int cmd_report(const RunConfig& cfg, const Vector& x, const Vector& y, std::ostream& out);
int cmd_check(const RunConfig& cfg, std::ostream& out);
int cmd_scan(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);

}  // namespace finsler
