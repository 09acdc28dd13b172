#pragma once

/**
 * @file battery.hpp
 * @brief The acceptance battery: one result per criterion, with measured values.
 */

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "finsler/oracle.hpp"

namespace finsler {

struct Measurement {
  std::string name;
  double value = 0.0;
  /// The bound the value is held to; `below` says which side passes.
  double bound = 0.0;
  bool below = true;

  bool ok() const { return below ? value < bound : value > bound; }
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Measurement> measured;
  std::vector<std::pair<std::string, double>> info;
  bool pass = false;
  double seconds = 0.0;
};

struct BatteryOptions {
  bool semi = true;
  bool full = true;
  std::uint64_t seed = 7;
  FdSpec fd;
  /// Overrides c of the boundary criterion (normally 1/3).
  double boundary_c = 1.0 / 3.0;
};

std::vector<CriterionResult> run_battery(const BatteryOptions& options = {});

/// One line: "PASS  3  title  name=value<bound ...".
std::string format_line(const CriterionResult& result);

}  // namespace finsler
