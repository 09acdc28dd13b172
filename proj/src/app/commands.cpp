#include "finsler/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "finsler/grid.hpp"

namespace finsler {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Oracle tolerances, as in the acceptance battery.
constexpr double kSemiTol = 1e-5;
constexpr double kFullTol = 1e-3;

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

Json tensor_json(const Tensor3& t) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < t.dimension(0); ++i) {
    Json b = Json::array();
    for (Eigen::Index j = 0; j < t.dimension(1); ++j) {
      Json c = Json::array();
      for (Eigen::Index k = 0; k < t.dimension(2); ++k) c.push_back(t(i, j, k));
      b.push_back(std::move(c));
    }
    a.push_back(std::move(b));
  }
  return a;
}

Json tensor_json(const Tensor4& t) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < t.dimension(0); ++i) {
    Json b = Json::array();
    for (Eigen::Index j = 0; j < t.dimension(1); ++j) {
      Json c = Json::array();
      for (Eigen::Index k = 0; k < t.dimension(2); ++k) {
        Json d = Json::array();
        for (Eigen::Index l = 0; l < t.dimension(3); ++l) d.push_back(t(i, j, k, l));
        c.push_back(std::move(d));
      }
      b.push_back(std::move(c));
    }
    a.push_back(std::move(b));
  }
  return a;
}

Json metric_json(const RunConfig& cfg) {
  Json m;
  m["name"] = cfg.metric;
  m["n"] = cfg.n;
  if (cfg.metric == "bryant") {
    m["c"] = cfg.c;
    m["c0"] = cfg.c0;
    m["domain"] = {cfg.r_lo, cfg.r_hi};
  } else if (cfg.metric == "family") {
    m["c0"] = cfg.c0;
    m["f1"] = cfg.f1;
    m["f2"] = cfg.f2;
    m["c1"] = cfg.c1;
    m["c2"] = cfg.c2;
    m["g"] = cfg.g;
  } else if (cfg.metric == "randers") {
    m["b"] = cfg.randers_b;
  }
  return m;
}

Json grid_json(const GridSpec& g) {
  return {{"r", {g.r.lo, g.r.hi, g.r.count}},
          {"s_fraction", {g.s_fraction.lo, g.s_fraction.hi, g.s_fraction.count}},
          {"angle_count", g.angle_count},
          {"seed", g.seed}};
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& fallback) {
  if (cfg.out.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(cfg.out);
  if (!file) throw Error(ErrorCode::ValidationError, "cannot open output file '" + cfg.out + "'");
  file << text;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::SingularFrame:
    case ErrorCode::ZeroVector:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidParameters:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::EmptyGridAfterGuards:
    case ErrorCode::IntegrandSingularOnPath:
    case ErrorCode::NonPositivePhi:
    case ErrorCode::StencilCrossesSingularSet: return kExitInvalid;
    default: return kExitInternal;
  }
}

template <class Body>
int guarded_command(const RunConfig& cfg, std::ostream& out, Body body) {
  try {
    return body();
  } catch (const Error& e) {
    const std::string text = error_record(e).dump(2) + "\n";
    try {
      emit(cfg, text, out);
    } catch (const Error&) {
      out << text;
    }
    return exit_code_for(e);
  } catch (const std::exception& e) {
    Json j{{"schema_version", kSchemaVersion}, {"error", {{"code", "Internal"}, {"message", e.what()}}}};
    out << j.dump(2) << "\n";
    return kExitInternal;
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// |v| / max(|v|, scale), 0 when both vanish; NaN passes through.
double relative(double v, double scale) { return relative_difference(v, 0.0, scale); }

struct FrameRecord {
  double r = 0, s = 0, u = 0;
  int angle_index = 0;
  bool valid = false;
  bool has_metric = false;
  double weak_berwald = kNaN, weak_landsberg = kNaN, landsberg_surface = kNaN, flat_flag = kNaN;
  double rel_weak_berwald = kNaN, rel_weak_landsberg = kNaN, rel_landsberg_surface = kNaN, rel_flat_flag = kNaN;
  double rel_L = kNaN, rel_J = kNaN;
  double predicted_weak_berwald = kNaN;
  PointFrame frame;
};

// With `spray_fallback`, frames whose metric is unusable (degenerate, or phi
// not integrable along the path) still contribute their spray residuals.
std::vector<FrameRecord> evaluate_grid(const MetricSpec& spec, const RunConfig& cfg, bool spray_fallback = false) {
  FrameGuards spray_only;
  spray_only.require_metric = false;
  std::vector<FrameRecord> records;
  for (GridFrame gf : sample_grid(spec, cfg.n, cfg.grid)) {
    bool with_metric = true;
    if (!gf.frame.valid && spray_fallback && gf.frame.x.size() == cfg.n) {
      gf.frame = make_frame(spec, gf.frame.x, gf.frame.y, spray_only);
      with_metric = false;
    }
    FrameRecord rec;
    rec.r = gf.r;
    rec.s = gf.s_fraction * gf.r;
    rec.u = gf.frame.u > 0.0 ? gf.frame.u : 1.0;
    rec.angle_index = gf.angle_index;
    rec.frame = gf.frame;
    if (gf.frame.valid) {
      try {
        const CurvaturePack pack = evaluate(spec, gf.frame, with_metric);
        rec.has_metric = pack.metric.has_value();
        const ConditionReport& res = pack.residuals;
        const Scales& sc = pack.scales;
        rec.weak_berwald = res.res_weak_berwald;
        rec.flat_flag = res.res_flat_flag;
        rec.rel_weak_berwald = relative(res.res_weak_berwald, sc.weak_berwald);
        rec.rel_flat_flag = relative(res.res_flat_flag, sc.flat_flag);
        if (pack.metric) {
          const MetricPart& m = *pack.metric;
          rec.weak_landsberg = res.res_weak_landsberg;
          rec.landsberg_surface = res.res_landsberg_surface;
          rec.rel_weak_landsberg =
              relative(res.res_weak_landsberg, sc.J / (0.5 * std::abs(m.scalars.phi) * gf.frame.r));
          rec.rel_landsberg_surface = relative(res.res_landsberg_surface, sc.landsberg_surface);
          rec.rel_L = relative(frobenius(m.L), sc.L);
          rec.rel_J = relative(m.J.norm(), sc.J);
        }
        if (spec.has_radial_data()) rec.predicted_weak_berwald = predicted_weak_berwald(spec, gf.frame.r, gf.frame.s);
        rec.valid = true;
      } catch (const Error&) {
        rec.valid = false;
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

struct Stats {
  double max_abs = kNaN, median_abs = kNaN, max_rel = kNaN, min_rel = kNaN;
};

template <class Abs, class Rel>
Stats stats(const std::vector<FrameRecord>& recs, Abs abs_of, Rel rel_of) {
  std::vector<double> a, r;
  for (const auto& rec : recs) {
    if (!rec.valid) continue;
    const double av = std::abs(abs_of(rec));
    const double rv = rel_of(rec);
    if (!std::isnan(av)) a.push_back(av);
    if (!std::isnan(rv)) r.push_back(rv);
  }
  Stats s;
  if (!a.empty()) {
    s.max_abs = *std::max_element(a.begin(), a.end());
    s.median_abs = median(a);
  }
  if (!r.empty()) {
    s.max_rel = *std::max_element(r.begin(), r.end());
    s.min_rel = *std::min_element(r.begin(), r.end());
  }
  return s;
}

Json stats_json(const Stats& s) {
  return {{"max", s.max_abs}, {"median", s.median_abs}, {"max_relative", s.max_rel}, {"min_relative", s.min_rel}};
}

struct ClaimVerdict {
  std::string measure;
  double value = kNaN;
  bool below = true;
  bool pass = false;
};

ClaimVerdict judge(Claim claim, const std::vector<FrameRecord>& recs, double tol) {
  const auto rel_L = stats(recs, [](const FrameRecord& r) { return r.rel_L; }, [](const FrameRecord& r) { return r.rel_L; });
  const auto wb = stats(recs, [](const FrameRecord& r) { return r.weak_berwald; },
                        [](const FrameRecord& r) { return r.rel_weak_berwald; });
  ClaimVerdict v;
  switch (claim) {
    case Claim::Landsberg:
      v = {"max |L|/scale", rel_L.max_rel, true};
      break;
    case Claim::NonLandsberg:
      v = {"min |L|/scale", rel_L.min_rel, false};
      break;
    case Claim::Flat:
      v = {"max relative flat flag", stats(recs, [](const FrameRecord& r) { return r.flat_flag; },
                                           [](const FrameRecord& r) { return r.rel_flat_flag; })
                                         .max_rel,
           true};
      break;
    case Claim::WeakLandsberg:
      v = {"max relative weak-landsberg", stats(recs, [](const FrameRecord& r) { return r.weak_landsberg; },
                                                [](const FrameRecord& r) { return r.rel_weak_landsberg; })
                                              .max_rel,
           true};
      break;
    case Claim::WeakBerwald:
      v = {"max relative weak-berwald", wb.max_rel, true};
      break;
    case Claim::NonBerwald:
      v = {"min relative weak-berwald", wb.min_rel, false};
      break;
  }
  v.pass = !std::isnan(v.value) && (v.below ? v.value < tol : v.value > tol);
  return v;
}

struct OracleSummary {
  int frames = 0;
  int rejected = 0;
  double G = 0, B = 0, Ric = 0;
  bool spray_skipped = false;
};

OracleSummary run_oracle(const MetricSpec& spec, const RunConfig& cfg, const std::vector<FrameRecord>& recs) {
  OracleSummary sum;
  FdSpec fd;
  fd.h_rel = cfg.h_rel;
  // Family metrics fix phi only along s (phi(r, 0) = 1), so F carries no
  // r-information and fd_spray cannot reproduce the family spray.
  const bool spray_from_f = cfg.oracle == OracleMode::Full && cfg.metric != "family";
  sum.spray_skipped = cfg.oracle == OracleMode::Full && !spray_from_f;
  const OracleMode mode = spray_from_f ? OracleMode::Full : OracleMode::Semi;
  for (const auto& rec : recs) {
    if (!rec.valid || rec.frame.root() <= 0.3 * rec.frame.r) continue;
    try {
      const CurvaturePack pack = evaluate(spec, rec.frame);
      const Tensor4 B = fd_berwald(spec, rec.frame.x, rec.frame.y, fd, mode);
      const double ric = fd_ricci(spec, rec.frame.x, rec.frame.y, fd, mode);
      sum.B = std::max(sum.B, relative_difference(pack.B, B, pack.scales.B));
      sum.Ric = std::max(sum.Ric, relative_difference(pack.Ric, ric, pack.scales.Ric));
      if (spray_from_f) {
        const Vector G = fd_spray(spec, rec.frame.x, rec.frame.y, fd);
        sum.G = std::max(sum.G, relative_difference(pack.spray.G, G));
      }
      ++sum.frames;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StencilCrossesSingularSet) throw;
      ++sum.rejected;
    }
  }
  return sum;
}

std::string csv_row(const FrameRecord& rec) {
  std::string line;
  for (double v : {rec.r, rec.s, rec.u}) line += format_number(v) + ",";
  line += std::to_string(rec.angle_index) + ",";
  for (double v : {rec.weak_berwald, rec.weak_landsberg, rec.landsberg_surface, rec.flat_flag}) {
    line += format_number(v) + ",";
  }
  line += rec.valid ? "1" : "0";
  return line + "\n";
}

struct ScanTarget {
  std::string list;  // empty for c
  std::size_t index = 0;
};

ScanTarget parse_target(const RunConfig& cfg, const std::string& parameter) {
  const auto bad = [&](const std::string& why) {
    throw Error(ErrorCode::ValidationError, "scan parameter '" + parameter + "': " + why);
  };
  if (parameter == "c") {
    if (cfg.metric != "bryant") bad("c applies to the bryant metric only");
    return {};
  }
  ScanTarget t;
  const auto open = parameter.find('[');
  t.list = parameter.substr(0, open);
  if (open != std::string::npos) {
    if (parameter.back() != ']') bad("expected name[index]");
    const std::string digits = parameter.substr(open + 1, parameter.size() - open - 2);
    const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.index);
    if (ec != std::errc() || p != digits.data() + digits.size() || digits.empty()) bad("bad coefficient index");
    if (t.index > 8) bad("coefficient index must be at most 8");
  }
  static const std::vector<std::string> lists = {"c0", "f1", "f2", "c1", "c2", "g"};
  if (std::find(lists.begin(), lists.end(), t.list) == lists.end()) bad("expected c, c0, f1, f2, c1, c2 or g");
  if (t.list == "c0" ? cfg.metric != "bryant" && cfg.metric != "family" : cfg.metric != "family") {
    bad("not a parameter of the " + cfg.metric + " metric");
  }
  return t;
}

std::vector<double>& coefficient_list(RunConfig& cfg, const std::string& name) {
  if (name == "c0") return cfg.c0;
  if (name == "f1") return cfg.f1;
  if (name == "f2") return cfg.f2;
  if (name == "c1") return cfg.c1;
  if (name == "c2") return cfg.c2;
  return cfg.g;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

Json error_record(const Error& e) {
  return {{"schema_version", kSchemaVersion}, {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

Json report_document(const RunConfig& cfg, const Vector& x, const Vector& y) {
  if (x.size() != cfg.n || y.size() != cfg.n) {
    throw Error(ErrorCode::DimensionMismatch, "x and y must have n = " + std::to_string(cfg.n) + " components");
  }
  const MetricSpec spec = make_spec(cfg);
  const PointFrame f = make_frame(spec, x, y);
  if (!f.valid) throw Error(ErrorCode::SingularFrame, f.reason);
  const CurvaturePack pack = evaluate(spec, f);
  const SprayData& sp = pack.spray;

  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["metric"] = metric_json(cfg);
  doc["frame"] = {{"x", vec_json(f.x)}, {"y", vec_json(f.y)}, {"r", f.r}, {"u", f.u}, {"s", f.s}};
  doc["spray"] = {{"P", sp.P}, {"Q", sp.Q}, {"G", vec_json(sp.G)}};

  Json tensors;
  Json scalars;
  if (pack.metric) {
    const MetricPart& m = *pack.metric;
    tensors["g"] = mat_json(m.g);
    tensors["g_inv"] = mat_json(m.g_inv);
    tensors["B"] = tensor_json(pack.B);
    tensors["E"] = mat_json(pack.E);
    tensors["L"] = tensor_json(m.L);
    tensors["J"] = vec_json(m.J);
    const LandsbergScalars& ls = m.landsberg;
    scalars = {{"L1", ls.L1}, {"L2", ls.L2}, {"L3", ls.L3}, {"L4", ls.L4}, {"L5", ls.L5}, {"L6", ls.L6},
               {"J1", m.J1},  {"J2", m.J2},  {"R1", pack.R1}, {"R3", pack.R3}, {"U", m.uw.U},  {"W", m.uw.W},
               {"Ric", pack.Ric}, {"K", m.K}};
  } else {
    tensors = {{"g", nullptr}, {"g_inv", nullptr}, {"B", tensor_json(pack.B)}, {"E", mat_json(pack.E)},
               {"L", nullptr}, {"J", nullptr}};
    scalars = {{"R1", pack.R1}, {"R3", pack.R3}, {"Ric", pack.Ric}};
  }
  doc["tensors"] = std::move(tensors);
  doc["scalars"] = std::move(scalars);

  const ConditionReport& res = pack.residuals;
  Json r = {{"valid", res.valid},
            {"res_weak_berwald", res.res_weak_berwald},
            {"res_weak_landsberg", res.res_weak_landsberg},
            {"res_landsberg_surface", res.res_landsberg_surface},
            {"res_flat_flag", res.res_flat_flag}};
  if (res.res_flatness_system) {
    const auto& e = *res.res_flatness_system;
    r["res_flatness_system"] = {e[0], e[1], e[2]};
  } else {
    r["res_flatness_system"] = nullptr;
  }
  doc["residuals"] = std::move(r);
  return doc;
}

CheckOutcome run_check(const RunConfig& cfg) {
  const MetricSpec spec = make_spec(cfg);
  const std::vector<FrameRecord> recs = evaluate_grid(spec, cfg);
  const auto valid = std::count_if(recs.begin(), recs.end(), [](const FrameRecord& r) { return r.valid; });
  if (valid == 0) {
    throw Error(ErrorCode::EmptyGridAfterGuards,
                "none of the " + std::to_string(recs.size()) + " grid frames survives the guards");
  }

  CheckOutcome out;
  out.csv = "r,s,u,angle_index,res_weak_berwald,res_weak_landsberg,res_landsberg_surface,res_flat_flag,valid\n";
  for (const auto& rec : recs) out.csv += csv_row(rec);

  Json& doc = out.summary;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "check";
  doc["metric"] = metric_json(cfg);
  doc["grid"] = grid_json(cfg.grid);
  doc["tol"] = cfg.tol;
  doc["frames"] = {{"sampled", recs.size()}, {"valid", valid}, {"rejected", static_cast<long>(recs.size()) - valid}};
  doc["conditions"] = {
      {"res_weak_berwald", stats_json(stats(recs, [](const FrameRecord& r) { return r.weak_berwald; },
                                            [](const FrameRecord& r) { return r.rel_weak_berwald; }))},
      {"res_weak_landsberg", stats_json(stats(recs, [](const FrameRecord& r) { return r.weak_landsberg; },
                                              [](const FrameRecord& r) { return r.rel_weak_landsberg; }))},
      {"res_landsberg_surface", stats_json(stats(recs, [](const FrameRecord& r) { return r.landsberg_surface; },
                                                 [](const FrameRecord& r) { return r.rel_landsberg_surface; }))},
      {"res_flat_flag", stats_json(stats(recs, [](const FrameRecord& r) { return r.flat_flag; },
                                         [](const FrameRecord& r) { return r.rel_flat_flag; }))},
      {"landsberg_norm", stats_json(stats(recs, [](const FrameRecord& r) { return r.rel_L; },
                                          [](const FrameRecord& r) { return r.rel_L; }))},
      {"mean_landsberg_norm", stats_json(stats(recs, [](const FrameRecord& r) { return r.rel_J; },
                                               [](const FrameRecord& r) { return r.rel_J; }))}};

  if (spec.has_radial_data()) {
    // The weak-Berwald combination against its closed-form prediction.
    const auto mismatch = stats(
        recs, [](const FrameRecord& r) { return r.weak_berwald - r.predicted_weak_berwald; },
        [](const FrameRecord& r) { return relative_difference(r.weak_berwald, r.predicted_weak_berwald); });
    doc["weak_berwald_vs_prediction"] = {{"max_relative", mismatch.max_rel}};
  }

  out.pass = true;
  Json claims = Json::array();
  for (Claim c : cfg.checks) {
    const ClaimVerdict v = judge(c, recs, cfg.tol);
    out.pass = out.pass && v.pass;
    claims.push_back({{"claim", std::string(to_string(c))},
                      {"measure", v.measure},
                      {"value", v.value},
                      {"relation", v.below ? "<" : ">"},
                      {"bound", cfg.tol},
                      {"pass", v.pass}});
  }
  doc["claims"] = std::move(claims);

  if (cfg.oracle != OracleMode::Off) {
    const OracleSummary o = run_oracle(spec, cfg, recs);
    const double tol = cfg.oracle == OracleMode::Full ? kFullTol : kSemiTol;
    const bool ok = o.frames > 0 && o.B < tol && o.Ric < tol && o.G < tol;
    out.pass = out.pass && ok;
    doc["oracle"] = {{"mode", std::string(to_string(cfg.oracle))},
                     {"frames", o.frames},
                     {"stencil_rejections", o.rejected},
                     {"tol", tol},
                     {"G", o.G},
                     {"B", o.B},
                     {"Ric", o.Ric},
                     {"spray_from_F_skipped", o.spray_skipped},
                     {"pass", ok}};
  }
  doc["pass"] = out.pass;
  return out;
}

std::string run_scan(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::ValidationError, "scan needs at least one value");
  const ScanTarget target = parse_target(cfg, parameter);
  std::string csv =
      "parameter,value,valid_frames,metric_frames,max_abs_weak_berwald,median_weak_berwald,min_abs_weak_berwald,"
      "max_rel_landsberg,max_abs_landsberg_surface,max_rel_weak_landsberg,max_rel_flat_flag\n";
  for (double value : values) {
    RunConfig run = cfg;
    run.checks.clear();
    if (target.list.empty()) {
      run.c = value;
    } else {
      auto& list = coefficient_list(run, target.list);
      if (list.size() <= target.index) list.resize(target.index + 1, 0.0);
      list[target.index] = value;
    }
    try {
      validate(run);
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, parameter + " = " + format_number(value) + ": " + e.what());
    }
    const MetricSpec spec = make_spec(run);
    const std::vector<FrameRecord> recs = evaluate_grid(spec, run, true);

    std::vector<double> signed_wb;
    long metric_frames = 0;
    for (const auto& r : recs) {
      if (r.valid) signed_wb.push_back(r.weak_berwald);
      if (r.valid && r.has_metric) ++metric_frames;
    }
    const auto wb = stats(recs, [](const FrameRecord& r) { return r.weak_berwald; },
                          [](const FrameRecord& r) { return std::abs(r.weak_berwald); });
    const auto L = stats(recs, [](const FrameRecord& r) { return r.rel_L; }, [](const FrameRecord& r) { return r.rel_L; });
    const auto surface = stats(recs, [](const FrameRecord& r) { return r.landsberg_surface; },
                               [](const FrameRecord& r) { return r.rel_landsberg_surface; });
    const auto wl = stats(recs, [](const FrameRecord& r) { return r.weak_landsberg; },
                          [](const FrameRecord& r) { return r.rel_weak_landsberg; });
    const auto flat = stats(recs, [](const FrameRecord& r) { return r.flat_flag; },
                            [](const FrameRecord& r) { return r.rel_flat_flag; });

    csv += parameter + "," + format_number(value) + "," + std::to_string(signed_wb.size()) + "," +
           std::to_string(metric_frames);
    for (double v : {wb.max_abs, median(signed_wb), wb.min_rel, L.max_rel, surface.max_abs, wl.max_rel, flat.max_rel}) {
      csv += "," + format_number(v);
    }
    csv += "\n";
  }
  return csv;
}

VerifyOutcome run_verify(const RunConfig& cfg) {
  BatteryOptions opt;
  if (cfg.oracle_given) {
    opt.semi = cfg.oracle != OracleMode::Off;
    opt.full = cfg.oracle == OracleMode::Full;
  }
  if (cfg.grid.seed_given) opt.seed = cfg.grid.seed;
  opt.fd.h_rel = cfg.h_rel;

  const auto start = std::chrono::steady_clock::now();
  std::vector<CriterionResult> results = run_battery(opt);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  VerifyOutcome out;
  out.pass = true;
  Json criteria = Json::array();
  for (const auto& r : results) {
    out.pass = out.pass && r.pass;
    Json measured = Json::array();
    for (const auto& m : r.measured) {
      measured.push_back(
          {{"name", m.name}, {"value", m.value}, {"relation", m.below ? "<" : ">"}, {"bound", m.bound}, {"pass", m.ok()}});
    }
    Json info = Json::object();
    for (const auto& [k, v] : r.info) info[k] = v;
    criteria.push_back({{"id", r.id},
                        {"title", r.title},
                        {"pass", r.pass},
                        {"seconds", r.seconds},
                        {"measured", std::move(measured)},
                        {"info", std::move(info)}});
  }
  out.document = {{"schema_version", kSchemaVersion},
                  {"command", "verify"},
                  {"oracle", {{"semi", opt.semi}, {"full", opt.full}, {"h_rel", opt.fd.h_rel}}},
                  {"seed", opt.seed},
                  {"criteria", std::move(criteria)},
                  {"seconds", seconds},
                  {"pass", out.pass}};
  out.results = std::move(results);
  return out;
}

int cmd_report(const RunConfig& cfg, const Vector& x, const Vector& y, std::ostream& out) {
  return guarded_command(cfg, out, [&] {
    emit(cfg, report_document(cfg, x, y).dump(2) + "\n", out);
    return kExitPass;
  });
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  return guarded_command(cfg, out, [&] {
    const CheckOutcome result = run_check(cfg);
    emit(cfg, cfg.format == OutputFormat::Csv ? result.csv : result.summary.dump(2) + "\n", out);
    return result.pass ? kExitPass : kExitCheckFailure;
  });
}

int cmd_scan(const RunConfig& cfg, const std::string& parameter, const std::vector<double>& values, std::ostream& out) {
  return guarded_command(cfg, out, [&] {
    emit(cfg, run_scan(cfg, parameter, values), out);
    return kExitPass;
  });
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  return guarded_command(cfg, out, [&] {
    const VerifyOutcome result = run_verify(cfg);
    if (cfg.format == OutputFormat::Csv) {
      std::string csv = "id,title,measure,value,relation,bound,pass\n";
      for (const auto& c : result.results) {
        for (const auto& m : c.measured) {
          csv += std::to_string(c.id) + ",\"" + c.title + "\",\"" + m.name + "\"," + format_number(m.value) + "," +
                 (m.below ? "<" : ">") + "," + format_number(m.bound) + "," + (m.ok() ? "1" : "0") + "\n";
        }
      }
      emit(cfg, csv, out);
    } else {
      emit(cfg, result.document.dump(2) + "\n", out);
    }
    return result.pass ? kExitPass : kExitCheckFailure;
  });
}

}  // namespace finsler
