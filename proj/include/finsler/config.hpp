#pragma once

/**
 * @file config.hpp
 * @brief Run configuration for the command-line front end.
 *
 * The document format is flat `key = value` text; `#` starts a comment and
 * unknown keys are rejected. Command-line flags are applied as overrides on
 * top of the document, using the same keys.
 *
 *     metric = bryant
 *     c = 2
 *     c0 = 0, 0.1        # c0(r) = 0 + 0.1 r
 *     grid = 0.5:2:16, 0.05:0.9:16, 4
 *     check = landsberg, flat, non-berwald
 */

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finsler/metric.hpp"
#include "finsler/oracle.hpp"

namespace finsler {

enum class OutputFormat { Json, Csv };

/// Conditions a check run can assert over its grid.
enum class Claim { Landsberg, NonLandsberg, Flat, WeakLandsberg, WeakBerwald, NonBerwald };

std::string_view to_string(Claim claim);
std::string_view to_string(OutputFormat format);

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  int count = 1;

  double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

struct GridSpec {
  Range r{0.5, 2.0, 16};
  /// s = fraction * r.
  Range s_fraction{0.05, 0.9, 16};
  int angle_count = 4;
  std::uint64_t seed = 1;
  bool seed_given = false;
};

struct RunConfig {
  std::string metric = "bryant";
  int n = 2;

  // bryant
  double c = 2.0;
  double r_lo = 0.5;
  double r_hi = 2.0;

  // family (c0 is shared with bryant); coefficient lists in ascending powers of r
  std::vector<double> c0{0.0};
  std::vector<double> f1{0.0};
  std::vector<double> f2{1.0};
  std::vector<double> c1{0.0};
  std::vector<double> c2{0.0};
  std::vector<double> g{0.0};

  // randers test metric phi = sqrt(1 + s^2) + b s
  double randers_b = 0.3;

  GridSpec grid;
  double tol = 1e-8;
  OracleMode oracle = OracleMode::Off;
  bool oracle_given = false;
  double h_rel = 1e-5;
  OutputFormat format = OutputFormat::Json;
  std::string out;
  std::vector<Claim> checks;
};

using Setting = std::pair<std::string, std::string>;

/// Parses a document, applies `overrides` in order, validates and fills the
/// default claim list. Throws ParseError (syntax, unknown key) or
/// ValidationError (bad values).
RunConfig parse_config(std::string_view text, const std::vector<Setting>& overrides = {});

/// Applies one key/value pair; `where` prefixes diagnostics.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where = "");

/// Range checks plus cross-field rules; fills cfg.checks when empty.
void validate(RunConfig& cfg);

/// "lo:hi:count, lo:hi:count, angles" (r range, s-fraction range, orientations).
GridSpec parse_grid(std::string_view text, GridSpec base = {});

/// A real number, also accepting a plain fraction such as "1/3".
double parse_real(std::string_view text, const std::string& field);

/// Comma- or space-separated list of reals.
std::vector<double> parse_list(std::string_view text, const std::string& field);

std::vector<Claim> default_claims(const RunConfig& cfg);

MetricSpec make_spec(const RunConfig& cfg);

/// The randers-type test metric sqrt(1 + s^2) + b s (nonzero B and L in every dimension).
MetricSpec randers(double b);

}  // namespace finsler
