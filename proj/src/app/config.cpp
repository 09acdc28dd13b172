#include "finsler/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace finsler {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find_first_of(seps, pos);
    const auto piece = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (!piece.empty()) out.push_back(piece);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& field, std::string_view value, const std::string& why) {
  throw Error(ErrorCode::ParseError, field + ": cannot parse '" + std::string(value) + "' (" + why + ")");
}

long long parse_integer(std::string_view text, const std::string& field) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(field, text, "expected an integer");
  return v;
}

Claim parse_claim(std::string_view text, const std::string& field) {
  static const std::map<std::string, Claim, std::less<>> names = {
      {"landsberg", Claim::Landsberg},          {"non-landsberg", Claim::NonLandsberg},
      {"flat", Claim::Flat},                    {"weak-landsberg", Claim::WeakLandsberg},
      {"weak-berwald", Claim::WeakBerwald},     {"non-berwald", Claim::NonBerwald}};
  const auto it = names.find(text);
  if (it == names.end()) bad_value(field, text, "unknown claim");
  return it->second;
}

OracleMode parse_oracle(std::string_view text, const std::string& field) {
  if (text == "off") return OracleMode::Off;
  if (text == "semi") return OracleMode::Semi;
  if (text == "full") return OracleMode::Full;
  bad_value(field, text, "expected off, semi or full");
}

Range parse_range(std::string_view text, const std::string& field) {
  const auto parts = split(text, ":");
  if (parts.size() != 3) bad_value(field, text, "expected lo:hi:count");
  return {parse_real(parts[0], field), parse_real(parts[1], field), static_cast<int>(parse_integer(parts[2], field))};
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

void check_range(const Range& r, const std::string& name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) invalid(name + " bounds must be finite");
  if (r.count < 1) invalid(name + " count must be >= 1");
  if (r.count > 1 && !(r.lo < r.hi)) invalid(name + " needs lo < hi");
  if (r.count == 1 && r.lo > r.hi) invalid(name + " needs lo <= hi");
}

void check_list(const std::vector<double>& v, const std::string& name) {
  if (v.empty()) invalid(name + " needs at least one coefficient");
  for (double x : v) {
    if (!std::isfinite(x)) invalid(name + " coefficients must be finite");
  }
}

bool is_one_third(double c) { return std::abs(3.0 * c - 1.0) < 1e-12; }

// f2 + r^2 c1 / 3 vanishes identically.
bool family_berwald_locus(const RunConfig& cfg) {
  std::vector<double> sum(std::max(cfg.f2.size(), cfg.c1.size() + 2), 0.0);
  for (std::size_t i = 0; i < cfg.f2.size(); ++i) sum[i] += cfg.f2[i];
  for (std::size_t i = 0; i < cfg.c1.size(); ++i) sum[i + 2] += cfg.c1[i] / 3.0;
  return std::all_of(sum.begin(), sum.end(), [](double v) { return std::abs(v) < 1e-12; });
}

}  // namespace

std::string_view to_string(Claim claim) {
  switch (claim) {
    case Claim::Landsberg: return "landsberg";
    case Claim::NonLandsberg: return "non-landsberg";
    case Claim::Flat: return "flat";
    case Claim::WeakLandsberg: return "weak-landsberg";
    case Claim::WeakBerwald: return "weak-berwald";
    case Claim::NonBerwald: return "non-berwald";
  }
  return "?";
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Json ? "json" : "csv"; }

double parse_real(std::string_view text, const std::string& field) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const double num = parse_real(text.substr(0, slash), field);
    const double den = parse_real(text.substr(slash + 1), field);
    if (den == 0.0) bad_value(field, text, "zero denominator");
    return num / den;
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) bad_value(field, text, "expected a number");
  return v;
}

std::vector<double> parse_list(std::string_view text, const std::string& field) {
  std::vector<double> out;
  for (auto piece : split(text, ", \t")) out.push_back(parse_real(piece, field));
  return out;
}

GridSpec parse_grid(std::string_view text, GridSpec base) {
  const auto parts = split(text, ",");
  if (parts.size() < 2 || parts.size() > 3) bad_value("grid", text, "expected r_lo:r_hi:count,sf_lo:sf_hi:count[,angles]");
  base.r = parse_range(parts[0], "grid");
  base.s_fraction = parse_range(parts[1], "grid");
  if (parts.size() == 3) base.angle_count = static_cast<int>(parse_integer(parts[2], "grid"));
  return base;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const std::string& where) {
  const std::string field = where.empty() ? std::string(key) : where + ": " + std::string(key);
  value = trim(value);
  if (key == "metric") {
    cfg.metric = std::string(value);
  } else if (key == "n") {
    cfg.n = static_cast<int>(parse_integer(value, field));
  } else if (key == "c") {
    cfg.c = parse_real(value, field);
  } else if (key == "domain") {
    const auto parts = split(value, ":");
    if (parts.size() != 2) bad_value(field, value, "expected r_lo:r_hi");
    cfg.r_lo = parse_real(parts[0], field);
    cfg.r_hi = parse_real(parts[1], field);
  } else if (key == "c0") {
    cfg.c0 = parse_list(value, field);
  } else if (key == "f1") {
    cfg.f1 = parse_list(value, field);
  } else if (key == "f2") {
    cfg.f2 = parse_list(value, field);
  } else if (key == "c1") {
    cfg.c1 = parse_list(value, field);
  } else if (key == "c2") {
    cfg.c2 = parse_list(value, field);
  } else if (key == "g") {
    cfg.g = parse_list(value, field);
  } else if (key == "randers_b") {
    cfg.randers_b = parse_real(value, field);
  } else if (key == "grid") {
    cfg.grid = parse_grid(value, cfg.grid);
  } else if (key == "seed") {
    const long long seed = parse_integer(value, field);
    if (seed < 0) bad_value(field, value, "seed must be nonnegative");
    cfg.grid.seed = static_cast<std::uint64_t>(seed);
    cfg.grid.seed_given = true;
  } else if (key == "tol") {
    cfg.tol = parse_real(value, field);
  } else if (key == "oracle") {
    cfg.oracle = parse_oracle(value, field);
    cfg.oracle_given = true;
  } else if (key == "h_rel") {
    cfg.h_rel = parse_real(value, field);
  } else if (key == "format") {
    if (value == "json") {
      cfg.format = OutputFormat::Json;
    } else if (value == "csv") {
      cfg.format = OutputFormat::Csv;
    } else {
      bad_value(field, value, "expected json or csv");
    }
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "check") {
    cfg.checks.clear();
    for (auto piece : split(value, ", \t")) cfg.checks.push_back(parse_claim(piece, field));
  } else {
    throw Error(ErrorCode::ParseError, (where.empty() ? "" : where + ": ") + "unknown key '" + std::string(key) + "'");
  }
}

std::vector<Claim> default_claims(const RunConfig& cfg) {
  if (cfg.metric == "euclidean") return {Claim::Landsberg, Claim::Flat, Claim::WeakLandsberg, Claim::WeakBerwald};
  if (cfg.metric == "riemann_quadratic") return {Claim::Landsberg, Claim::WeakLandsberg, Claim::WeakBerwald};
  if (cfg.metric == "family") {
    if (family_berwald_locus(cfg)) return {Claim::Landsberg, Claim::WeakBerwald};
    return {Claim::Landsberg, Claim::NonBerwald};
  }
  if (cfg.metric == "bryant") {
    return {Claim::Landsberg, Claim::Flat, Claim::WeakLandsberg, is_one_third(cfg.c) ? Claim::WeakBerwald : Claim::NonBerwald};
  }
  return {Claim::NonLandsberg};
}

void validate(RunConfig& cfg) {
  static const std::vector<std::string> metrics = {"euclidean", "riemann_quadratic", "family", "bryant", "randers"};
  if (cfg.metric == "riemann") cfg.metric = "riemann_quadratic";
  if (std::find(metrics.begin(), metrics.end(), cfg.metric) == metrics.end()) {
    invalid("metric must be one of euclidean, riemann_quadratic, family, bryant, randers (got '" + cfg.metric + "')");
  }
  if (cfg.n < 2 || cfg.n > 4) invalid("n must be 2, 3 or 4");
  check_range(cfg.grid.r, "grid r range");
  check_range(cfg.grid.s_fraction, "grid s-fraction range");
  if (!(cfg.grid.r.lo > 0.0)) invalid("grid r range must be positive");
  if (!(cfg.grid.s_fraction.lo > -1.0 && cfg.grid.s_fraction.hi < 1.0)) {
    invalid("grid s-fractions must lie in (-1, 1)");
  }
  if (cfg.grid.angle_count < 1) invalid("grid angle count must be >= 1");
  if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) invalid("tol must be positive");
  if (!(cfg.h_rel >= 1e-8 && cfg.h_rel <= 1e-2)) invalid("h_rel must lie in [1e-8, 1e-2]");
  if (!std::isfinite(cfg.c)) invalid("c must be finite");
  if (!(std::abs(cfg.randers_b) < 1.0)) invalid("randers_b must satisfy |b| < 1");
  for (const auto& [list, name] : {std::pair{&cfg.c0, "c0"}, {&cfg.f1, "f1"}, {&cfg.f2, "f2"}, {&cfg.c1, "c1"},
                                   {&cfg.c2, "c2"}, {&cfg.g, "g"}}) {
    check_list(*list, name);
  }

  if (cfg.checks.empty()) cfg.checks = default_claims(cfg);
  const bool non_berwald = std::find(cfg.checks.begin(), cfg.checks.end(), Claim::NonBerwald) != cfg.checks.end();
  if (non_berwald && cfg.metric == "bryant" && is_one_third(cfg.c)) {
    invalid("c = 1/3 is excluded for the non-berwald claim: the weak-Berwald combination (3c - 1)/sqrt(r^2 - s^2) "
            "vanishes, so the surface is Berwald");
  }
  if (non_berwald && cfg.metric == "family" && family_berwald_locus(cfg)) {
    invalid("f2 = -r^2 c1 / 3 makes the family weakly Berwald; the non-berwald claim cannot hold");
  }
  if (cfg.metric == "bryant") {
    try {
      make_spec(cfg);
    } catch (const Error& e) {
      invalid(std::string("bryant parameters: ") + e.what());
    }
  }
}

RunConfig parse_config(std::string_view text, const std::vector<Setting>& overrides) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const std::string where = "line " + std::to_string(number);
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, where + ": expected 'key = value', got '" + std::string(view) + "'");
    }
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ParseError, where + ": missing key");
    apply_setting(cfg, key, view.substr(eq + 1), where);
  }
  for (const auto& [key, value] : overrides) apply_setting(cfg, key, value, "--" + key);
  validate(cfg);
  return cfg;
}

MetricSpec randers(double b) {
  return phi_form("randers", [b](const Jet&, const Jet& s) { return sqrt(1.0 + s * s) + b * s; });
}

MetricSpec make_spec(const RunConfig& cfg) {
  if (cfg.metric == "euclidean") return euclidean();
  if (cfg.metric == "riemann_quadratic" || cfg.metric == "riemann") return riemann_quadratic();
  if (cfg.metric == "randers") return randers(cfg.randers_b);
  if (cfg.metric == "family") {
    FamilyParams p;
    p.f1 = RadialPolynomial(cfg.f1);
    p.f2 = RadialPolynomial(cfg.f2);
    p.c0 = RadialPolynomial(cfg.c0);
    p.c1 = RadialPolynomial(cfg.c1);
    p.c2 = RadialPolynomial(cfg.c2);
    p.g_offset = RadialPolynomial(cfg.g);
    return family(std::move(p));
  }
  if (cfg.metric == "bryant") {
    BryantParams p;
    p.c = cfg.c;
    p.c0 = RadialPolynomial(cfg.c0);
    p.r_lo = cfg.r_lo;
    p.r_hi = cfg.r_hi;
    return bryant(std::move(p));
  }
  throw Error(ErrorCode::ValidationError, "unknown metric '" + cfg.metric + "'");
}

}  // namespace finsler
