#include "finsler/battery.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include "finsler/config.hpp"
#include "finsler/grid.hpp"

namespace finsler {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Running max / min that never forget a NaN.
struct Max {
  double v = 0.0;
  void add(double x) {
    if (std::isnan(v)) return;
    if (std::isnan(x) || x > v) v = x;
  }
};

struct Min {
  double v = kInf;
  void add(double x) {
    if (std::isnan(v)) return;
    if (std::isnan(x) || x < v) v = x;
  }
};

struct Named {
  std::string name;
  MetricSpec spec;
  /// fd_spray of phi reproduces the spray (false for the family, whose phi
  /// carries no r-dependence).
  bool spray_from_phi = true;
  double r_lo = 0.6;
  double r_hi = 1.9;
  bool positive_s = false;
};

MetricSpec bryant_spec(double c, std::vector<double> c0, double lo, double hi) {
  BryantParams p;
  p.c = c;
  p.c0 = RadialPolynomial(std::move(c0));
  p.r_lo = lo;
  p.r_hi = hi;
  return bryant(std::move(p));
}

MetricSpec family_spec(double f2, double g) {
  FamilyParams p;
  p.f1 = RadialPolynomial::constant(0.0);
  p.f2 = RadialPolynomial::constant(f2);
  p.c0 = RadialPolynomial::constant(0.0);
  p.c1 = RadialPolynomial::constant(0.0);
  p.c2 = RadialPolynomial::constant(0.0);
  p.g_offset = RadialPolynomial::constant(g);
  return family(std::move(p));
}

std::vector<Named> builtin_specs() {
  return {{"euclidean", euclidean()},
          {"riemann_quadratic", riemann_quadratic()},
          {"family", family_spec(1.0, 0.0), false, 0.6, 1.9, true},
          {"bryant", bryant_spec(2.0, {0.0}, 0.5, 2.0), true, 0.6, 1.9, true},
          {"randers", randers(0.3)}};
}

std::vector<PointFrame> valid_frames(const MetricSpec& spec, int n, const GridSpec& grid) {
  std::vector<PointFrame> out;
  for (auto& cell : sample_grid(spec, n, grid)) {
    if (cell.frame.valid) out.push_back(std::move(cell.frame));
  }
  return out;
}

// A random valid frame with sqrt(r^2 - s^2) > 0.3 r, random orientation and |y|.
std::optional<PointFrame> random_frame(const Named& named, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double r = named.r_lo + (named.r_hi - named.r_lo) * unit(rng);
    const double sf = named.positive_s ? 0.05 + 0.85 * unit(rng) : -0.9 + 1.8 * unit(rng);
    const double tilt = 3.0 * (unit(rng) - 0.5);
    auto [x, y] = oriented_frame(n, r, sf, 0.0, tilt);
    const Matrix R = random_rotation(n, rng);
    const double scale = 0.5 + 1.5 * unit(rng);
    const PointFrame f = make_frame(named.spec, R * x, scale * (R * y));
    if (f.valid && f.root() > 0.3 * f.r) return f;
  }
  return std::nullopt;
}

bool is_stencil_error(const Error& e) { return e.code() == ErrorCode::StencilCrossesSingularSet; }

// y^l T_jkl as a matrix.
Matrix contract_last(const Tensor3& t, const Vector& y) {
  const int n = static_cast<int>(y.size());
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) out(j, k) += t(j, k, l) * y[l];
    }
  }
  return out;
}

double tensor_asymmetry(const Tensor4& B) {
  const int n = static_cast<int>(B.dimension(0));
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const double b = B(i, j, k, l);
          for (double other : {B(i, j, l, k), B(i, k, j, l), B(i, k, l, j), B(i, l, j, k), B(i, l, k, j)}) {
            worst = std::max(worst, std::abs(b - other));
          }
        }
      }
    }
  }
  return worst;
}

double tensor_asymmetry(const Tensor3& L) {
  const int n = static_cast<int>(L.dimension(0));
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        const double v = L(j, k, l);
        for (double other : {L(j, l, k), L(k, j, l), L(k, l, j), L(l, j, k), L(l, k, j)}) {
          worst = std::max(worst, std::abs(v - other));
        }
      }
    }
  }
  return worst;
}

double ratio(double value, double scale) { return scale > 0.0 ? value / scale : value; }

CriterionResult finish(CriterionResult r, std::chrono::steady_clock::time_point start) {
  r.pass = !r.measured.empty();
  for (const auto& m : r.measured) r.pass = r.pass && m.ok();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

using Clock = std::chrono::steady_clock;

CriterionResult titled(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

CriterionResult flat_baseline() {
  const auto start = Clock::now();
  CriterionResult res = titled(1, "flat baseline: euclidean tensors vanish on a 16x16x4 grid");
  const MetricSpec spec = euclidean();
  Max g, B, E, L, J, ric;
  const auto frames = valid_frames(spec, 2, GridSpec{});
  for (const auto& f : frames) {
    const auto pack = evaluate(spec, f);
    g.add((pack.metric->g - Matrix::Identity(f.n, f.n)).norm());
    B.add(frobenius(pack.B));
    E.add(pack.E.norm());
    L.add(frobenius(pack.metric->L));
    J.add(pack.metric->J.norm());
    ric.add(std::abs(pack.Ric));
  }
  res.measured = {{"max|g-I|", g.v, 1e-12}, {"max|B|", B.v, 1e-12}, {"max|E|", E.v, 1e-12},
                  {"max|L|", L.v, 1e-12},   {"max|J|", J.v, 1e-12}, {"max|Ric|", ric.v, 1e-12}};
  res.info = {{"frames", static_cast<double>(frames.size())}};
  return finish(res, start);
}

CriterionResult riemann_baseline(const BatteryOptions& opt) {
  const auto start = Clock::now();
  CriterionResult res = titled(2, "riemannian baseline: P = 0, Q = 1/(2(1+r^2)), B = L = 0, Ric matches fd_ricci");
  const MetricSpec spec = riemann_quadratic();
  Max P, Q, B, L, ric_semi, ric_full;
  const auto frames = valid_frames(spec, 2, GridSpec{});
  int oracle_frames = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const auto pack = evaluate(spec, f);
    const double q = 1.0 / (2.0 * (1.0 + f.r * f.r));
    P.add(std::abs(pack.spray.P) / q);
    Q.add(std::abs(pack.spray.Q - q) / q);
    B.add(frobenius(pack.B));
    L.add(frobenius(pack.metric->L));
    if (i % 64 == 0) {
      ++oracle_frames;
      if (opt.semi) {
        ric_semi.add(relative_difference(pack.Ric, fd_ricci(spec, f.x, f.y, opt.fd, OracleMode::Semi), pack.scales.Ric));
      }
      if (opt.full) {
        ric_full.add(relative_difference(pack.Ric, fd_ricci(spec, f.x, f.y, opt.fd, OracleMode::Full), pack.scales.Ric));
      }
    }
  }
  res.measured = {{"max|P|/Q", P.v, 1e-10}, {"max rel|Q-Q*|", Q.v, 1e-10}, {"max|B|", B.v, 1e-9},
                  {"max|L|", L.v, 1e-9}};
  if (opt.semi) res.measured.push_back({"Ric vs fd_ricci semi", ric_semi.v, 1e-4});
  if (opt.full) res.measured.push_back({"Ric vs fd_ricci full", ric_full.v, 1e-4});
  res.info = {{"frames", static_cast<double>(frames.size())}, {"oracle frames", static_cast<double>(oracle_frames)}};
  return finish(res, start);
}

CriterionResult landsberg_family(const BatteryOptions& opt) {
  const auto start = Clock::now();
  CriterionResult res = titled(3, "landsberg family: 20 random parameter sets satisfy the surface equation");
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  auto poly = [&] { return RadialPolynomial({coeff(rng), coeff(rng), coeff(rng)}); };
  GridSpec grid;
  grid.r.count = 8;
  grid.s_fraction.count = 8;
  grid.angle_count = 2;
  Max surface, weak_berwald;
  Min per_set_frames;
  int total = 0;
  for (int set = 0; set < 20; ++set) {
    FamilyParams p{poly(), poly(), poly(), poly(), poly(), RadialPolynomial::constant(0.0)};
    const MetricSpec spec = family(std::move(p));
    grid.seed = opt.seed + set;
    const auto frames = valid_frames(spec, 2, grid);
    per_set_frames.add(static_cast<double>(frames.size()));
    total += static_cast<int>(frames.size());
    for (const auto& f : frames) {
      const auto pack = evaluate(spec, f);
      surface.add(std::abs(pack.residuals.res_landsberg_surface));
      const double predicted = (f.n + 1) / 3.0 * predicted_weak_berwald(spec, f.r, f.s);
      weak_berwald.add(relative_difference(pack.residuals.res_weak_berwald, predicted, pack.scales.weak_berwald));
    }
  }
  res.measured = {{"max|landsberg surface residual|", surface.v, 1e-8},
                  {"max rel weak-berwald vs prediction", weak_berwald.v, 1e-8},
                  {"min valid frames per set", per_set_frames.v, 0.0, false}};
  res.info = {{"frames", static_cast<double>(total)}};
  return finish(res, start);
}

CriterionResult bryant_surface() {
  const auto start = Clock::now();
  CriterionResult res = titled(4, "bryant surface: landsberg, J = 0, K = 0, non-berwald, flatness system");
  Max L, J, flat, system;
  Min weak_berwald;
  int total = 0;
  for (double c : {-0.5, 0.5, 2.0}) {
    for (const std::vector<double>& c0 : {std::vector<double>{0.0}, std::vector<double>{0.0, 0.1}}) {
      // 2 r^2 c0 - 1 vanishes at r = 5^(1/3) ~ 1.71 for c0 = 0.1 r.
      const double hi = c0.size() > 1 ? 1.5 : 2.0;
      const MetricSpec spec = bryant_spec(c, c0, 0.5, hi);
      GridSpec grid;
      grid.r = {0.5, hi, 16};
      grid.angle_count = 1;
      for (const auto& f : valid_frames(spec, 2, grid)) {
        if (!(f.root() > 0.3 * f.r)) continue;
        ++total;
        const auto pack = evaluate(spec, f);
        L.add(ratio(frobenius(pack.metric->L), pack.scales.L));
        J.add(ratio(pack.metric->J.norm(), pack.scales.J));
        flat.add(std::abs(pack.residuals.res_flat_flag));
        weak_berwald.add(std::abs(pack.residuals.res_weak_berwald));
        for (double e : *pack.residuals.res_flatness_system) system.add(std::abs(e));
      }
    }
  }
  res.measured = {{"max|L|/scale", L.v, 1e-8},
                  {"max|J|/scale", J.v, 1e-8},
                  {"max|flat flag|", flat.v, 1e-8},
                  {"min|weak-berwald|", weak_berwald.v, 0.05, false},
                  {"max|flatness system|", system.v, 1e-9}};
  res.info = {{"frames", static_cast<double>(total)}};
  return finish(res, start);
}

CriterionResult boundary_case(const BatteryOptions& opt) {
  const auto start = Clock::now();
  CriterionResult res = titled(5, "boundary c = 1/3: weakly berwald and berwald");
  const MetricSpec spec = bryant_spec(opt.boundary_c, {0.0}, 0.5, 2.0);
  GridSpec grid;
  grid.angle_count = 1;
  Max wb, B;
  const auto frames = valid_frames(spec, 2, grid);
  for (const auto& f : frames) {
    const auto pack = evaluate(spec, f);
    wb.add(std::abs(pack.residuals.res_weak_berwald));
    B.add(ratio(frobenius(pack.B), pack.scales.B));
  }
  res.measured = {{"max|weak-berwald|", wb.v, 1e-9}, {"max|B|/scale", B.v, 1e-6}};
  res.info = {{"c", opt.boundary_c}, {"frames", static_cast<double>(frames.size())}};
  return finish(res, start);
}

CriterionResult oracle_equivalence(const BatteryOptions& opt) {
  const auto start = Clock::now();
  CriterionResult res = titled(6, "oracle equivalence: engine g, G, B, Ric, L against finite differences");
  std::mt19937_64 rng(opt.seed + 1000);
  Max g, G, B_semi, ric_semi, L_id, B_full, ric_full;
  SigmaCalibrator sigma;
  int frames = 0, rejected = 0;
  const auto specs = builtin_specs();
  for (int n : {2, 3}) {
    for (const auto& named : specs) {
      int done = 0;
      for (int attempt = 0; done < 10 && attempt < 50; ++attempt) {
        const auto f = random_frame(named, n, rng);
        if (!f) break;
        try {
          const auto pack = evaluate(named.spec, *f);
          const Matrix g_fd = fd_metric_tensor(named.spec, f->x, f->y, opt.fd);
          const double dg = relative_difference(pack.metric->g, g_fd);
          double dG = 0.0, dBs = 0.0, dRs = 0.0, dL = 0.0, dBf = 0.0, dRf = 0.0;
          if (named.spray_from_phi) {
            const double G_scale = f->u * f->u * (std::abs(pack.spray.P) * f->u + std::abs(pack.spray.Q) * f->r);
            dG = relative_difference(pack.spray.G, fd_spray(named.spec, f->x, f->y, opt.fd), G_scale);
          }
          std::optional<Tensor4> B_fd;
          if (opt.semi) {
            B_fd = fd_berwald(named.spec, f->x, f->y, opt.fd, OracleMode::Semi);
            dBs = relative_difference(pack.B, *B_fd, pack.scales.B);
            dRs = relative_difference(pack.Ric, fd_ricci(named.spec, f->x, f->y, opt.fd, OracleMode::Semi),
                                      pack.scales.Ric);
          }
          if (opt.full && named.spray_from_phi) {
            const Tensor4 B_full_fd = fd_berwald(named.spec, f->x, f->y, opt.fd, OracleMode::Full);
            if (!B_fd) B_fd = B_full_fd;
            dBf = relative_difference(pack.B, B_full_fd, pack.scales.B);
            dRf = relative_difference(pack.Ric, fd_ricci(named.spec, f->x, f->y, opt.fd, OracleMode::Full),
                                      pack.scales.Ric);
          }
          if (B_fd) dL = sigma.observe(pack.metric->L, landsberg_identity(g_fd, *B_fd, f->y), pack.scales.L);
          g.add(dg);
          G.add(dG);
          B_semi.add(dBs);
          ric_semi.add(dRs);
          L_id.add(dL);
          B_full.add(dBf);
          ric_full.add(dRf);
          ++done;
          ++frames;
        } catch (const Error& e) {
          if (!is_stencil_error(e)) throw;
          ++rejected;
        }
      }
    }
  }
  res.measured = {{"g", g.v, 1e-5}, {"G", G.v, 1e-5}};
  if (opt.semi) {
    res.measured.push_back({"B semi", B_semi.v, 1e-5});
    res.measured.push_back({"Ric semi", ric_semi.v, 1e-5});
  }
  if (opt.full) {
    res.measured.push_back({"B full", B_full.v, 1e-3});
    res.measured.push_back({"Ric full", ric_full.v, 1e-3});
  }
  if (opt.semi || opt.full) res.measured.push_back({"L sigma identity", L_id.v, 1e-4});
  res.measured.push_back({"frames", static_cast<double>(frames), 99.5, false});
  res.info = {{"sigma", static_cast<double>(sigma.sigma().value_or(0))},
              {"stencil rejections", static_cast<double>(rejected)}};
  return finish(res, start);
}

CriterionResult structural_invariants(const BatteryOptions& opt) {
  const auto start = Clock::now();
  CriterionResult res = titled(7, "structural invariants: homogeneity, symmetry, contractions, traces, rotations");
  std::mt19937_64 rng(opt.seed + 2000);
  Max homog, sym, yL, yE, Jy, trace_E, trace_J, rot;
  int frames = 0;
  const auto specs = builtin_specs();
  int k = 0;
  while (frames < 200) {
    const auto& named = specs[k % specs.size()];
    const int n = 2 + (k / static_cast<int>(specs.size())) % 3;
    ++k;
    const auto f = random_frame(named, n, rng);
    if (!f) continue;
    ++frames;
    const auto pack = evaluate(named.spec, *f);
    const auto& m = *pack.metric;
    const auto& sc = pack.scales;

    // homogeneity at lambda = 2
    const auto pack2 = evaluate(named.spec, make_frame(named.spec, f->x, 2.0 * f->y));
    const Tensor4 B_half = pack.B * 0.5;
    homog.add(relative_difference(pack2.metric->g, m.g));
    homog.add(relative_difference(pack2.spray.G, Vector(4.0 * pack.spray.G), 4.0 * pack.spray.G.norm()));
    homog.add(relative_difference(pack2.B, B_half, 0.5 * sc.B));
    homog.add(relative_difference(pack2.E, Matrix(0.5 * pack.E), 0.5 * sc.E));

    // symmetry
    sym.add(ratio((m.g - m.g.transpose()).norm(), m.g.norm()));
    sym.add(ratio((pack.E - pack.E.transpose()).norm(), std::max(pack.E.norm(), sc.E)));
    sym.add(ratio(tensor_asymmetry(pack.B), std::max(frobenius(pack.B), sc.B)));
    sym.add(ratio(tensor_asymmetry(m.L), std::max(frobenius(m.L), sc.L)));

    // contractions
    yL.add(ratio(contract_last(m.L, f->y).norm(), std::max(frobenius(m.L), sc.L) * f->u));
    yE.add(ratio((pack.E * f->y).norm(), std::max(pack.E.norm(), sc.E) * f->u));
    Jy.add(ratio(std::abs(m.J.dot(f->y)), std::max(m.J.norm(), sc.J) * f->u));

    // traces
    Matrix trB = Matrix::Zero(n, n);
    Vector trL = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int mm = 0; mm < n; ++mm) trB(i, j) += pack.B(mm, i, j, mm);
        for (int l = 0; l < n; ++l) trL[i] += m.L(i, j, l) * m.g_inv(j, l);
      }
    }
    trace_E.add(relative_difference(pack.E, trB, sc.E));
    trace_J.add(relative_difference(m.J, trL, sc.J));

    // rotational equivariance of the scalar outputs
    const Matrix R = random_rotation(n, rng);
    const PointFrame fr = make_frame(named.spec, R * f->x, R * f->y);
    if (!fr.valid) {
      rot.add(kInf);
      continue;
    }
    const auto packr = evaluate(named.spec, fr);
    const auto& a = pack.residuals;
    const auto& b = packr.residuals;
    const double pq_scale = std::abs(pack.spray.P) + f->r * std::abs(pack.spray.Q);
    rot.add(relative_difference(pack.spray.P, packr.spray.P, pq_scale));
    rot.add(relative_difference(pack.spray.Q, packr.spray.Q, pq_scale / f->r));
    rot.add(relative_difference(pack.Ric, packr.Ric, sc.Ric));
    if (n == 2) rot.add(relative_difference(m.K, packr.metric->K, sc.Ric / (f->u * f->u * m.scalars.phi * m.scalars.phi)));
    rot.add(relative_difference(a.res_weak_berwald, b.res_weak_berwald, sc.weak_berwald));
    rot.add(relative_difference(a.res_weak_landsberg, b.res_weak_landsberg, sc.J / (0.5 * m.scalars.phi * f->r)));
    rot.add(relative_difference(a.res_landsberg_surface, b.res_landsberg_surface, sc.landsberg_surface));
    rot.add(relative_difference(a.res_flat_flag, b.res_flat_flag, sc.flat_flag));
  }
  res.measured = {{"homogeneity", homog.v, 1e-12},       {"symmetry", sym.v, 1e-12},
                  {"y.L", yL.v, 1e-10},                  {"y.E", yE.v, 1e-10},
                  {"J.y", Jy.v, 1e-12},                  {"E = tr B", trace_E.v, 1e-9},
                  {"J = g-tr L", trace_J.v, 1e-9},       {"rotation", rot.v, 1e-12}};
  res.info = {{"frames", static_cast<double>(frames)}};
  return finish(res, start);
}

CriterionResult cross_partial() {
  const auto start = Clock::now();
  CriterionResult res = titled(8, "bryant phi: (ln phi)_sr = (ln phi)_rs");
  Max worst;
  int total = 0;
  for (const std::vector<double>& c0 : {std::vector<double>{0.0}, std::vector<double>{0.0, 0.1}}) {
    const double hi = c0.size() > 1 ? 1.5 : 2.0;
    const MetricSpec spec = bryant_spec(2.0, c0, 0.5, hi);
    GridSpec grid;
    grid.r = {0.5, hi, 16};
    grid.angle_count = 1;
    for (const auto& f : valid_frames(spec, 2, grid)) {
      ++total;
      const auto parts = log_phi_partials(spec, f.r, f.s, {1, 1});
      worst.add(relative_difference(parts.ls.extract(1, 0), parts.lr.extract(0, 1)));
    }
  }
  res.measured = {{"max rel mismatch", worst.v, 1e-9}};
  res.info = {{"frames", static_cast<double>(total)}};
  return finish(res, start);
}

CriterionResult negative_control() {
  const auto start = Clock::now();
  CriterionResult res = titled(9, "negative control: family with g = 0.1 breaks the surface equation");
  const MetricSpec spec = family_spec(1.0, 0.1);
  Max worst;
  const auto frames = valid_frames(spec, 2, GridSpec{});
  for (const auto& f : frames) worst.add(std::abs(evaluate(spec, f).residuals.res_landsberg_surface));
  res.measured = {{"max|landsberg surface residual|", worst.v, 1e-3, false}};
  res.info = {{"frames", static_cast<double>(frames.size())}};
  return finish(res, start);
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::vector<CriterionResult> run_battery(const BatteryOptions& options) {
  options.fd.validate();
  std::vector<std::function<CriterionResult()>> criteria = {
      [] { return flat_baseline(); },
      [&] { return riemann_baseline(options); },
      [&] { return landsberg_family(options); },
      [] { return bryant_surface(); },
      [&] { return boundary_case(options); },
      [&] { return oracle_equivalence(options); },
      [&] { return structural_invariants(options); },
      [] { return cross_partial(); },
      [] { return negative_control(); },
  };
  std::vector<CriterionResult> out;
  int id = 0;
  for (const auto& run : criteria) {
    ++id;
    try {
      out.push_back(run());
    } catch (const std::exception& e) {
      CriterionResult failed = titled(id, "criterion raised an error");
      failed.measured = {{std::string("error: ") + e.what(), 1.0, 0.0}};
      out.push_back(failed);
    }
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::string line = std::string(r.pass ? "PASS" : "FAIL") + "  " + std::to_string(r.id) + "  " + r.title + "  |";
  for (const auto& m : r.measured) {
    line += " " + m.name + "=" + number(m.value) + (m.below ? "<" : ">") + number(m.bound) + (m.ok() ? "" : "!");
    line += ";";
  }
  for (const auto& [name, value] : r.info) line += " " + name + "=" + number(value) + ";";
  char t[32];
  std::snprintf(t, sizeof t, " (%.2fs)", r.seconds);
  return line + t;
}

}  // namespace finsler
