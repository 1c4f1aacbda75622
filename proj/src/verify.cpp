#include "proxuc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "proxuc/errors.hpp"
#include "proxuc/moduli.hpp"

namespace proxuc {

namespace {

using nlohmann::json;

Vec zeros(int dim) { return Vec(dim, 0.0); }

// Honest double-arithmetic cushion for zero-slack inequalities.
double fl(double scale) {
  return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(scale));
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

double reg_term(const YoungFunction& F, double lam, bool pr, double t) {
  return pr ? lam * young_eval(F, t / lam) : young_eval(F, t) / young_density(F, lam);
}

// Composed-modulus value with the underflow contract folded in: a zero return
// is the weakest valid lower bound, so skipping the term keeps claims sound.
double compose_or_zero(const NormedSpace& S, const YoungFunction& F, double r, double t,
                       bool& degraded) {
  if (!(t > 0.0)) return 0.0;
  try {
    double v = compose_modulus(S, F, r, t);
    if (!std::isfinite(v) || v < 0.0) {
      degraded = true;
      return 0.0;
    }
    return v;
  } catch (const InputError&) {
    degraded = true;
    return 0.0;
  }
}

std::optional<double> eval_modulus(const Modulus& M, double eps) {
  try {
    double v = M(eps);
    if (!std::isfinite(v) || !(v > 0.0)) return std::nullopt;
    return v;
  } catch (const InputError&) {
    return std::nullopt;
  }
}

struct Recorder {
  CheckOutcome& out;
  json worst;
  bool noted_nonfinite = false;

  void record(double margin, const std::function<json()>& builder) {
    if (std::isnan(margin)) {
      margin = -std::numeric_limits<double>::infinity();
      if (!noted_nonfinite) {
        out.notes.push_back("a margin evaluated to NaN and was treated as a violation");
        noted_nonfinite = true;
      }
    }
    out.samples += 1;
    out.margins.push_back(margin);
    if (margin < 0.0) out.violations += 1;
    if (margin < out.min_margin) {
      out.min_margin = margin;
      worst = builder();
      worst["margin"] = margin;
    }
  }
};

struct Ctx {
  const CheckSpec& spec;
  CheckOutcome& out;
  NormedSpace S;
  YoungFunction F;
  SampleRng rng;
  ConvexFunction f;
  Vec center;
  ProxOptions opt;
  int failure_notes = 0;

  double dist(const Vec& a, const Vec& b) const { return norm(S, sub(a, b)); }

  std::optional<ProxResult> solve(bool pr, double lam, const Vec& x, const char* where) {
    try {
      return pr ? prox_pr(S, f, F, lam, x, opt) : prox_young(S, f, F, lam, x, opt);
    } catch (const SolverError& e) {
      out.solver_failures += 1;
      if (failure_notes < 4) {
        out.notes.push_back(std::string("solver budget exhausted (") + where +
                            ", lam=" + num(lam) + ", certified gap " + num(e.gap) + ")");
        ++failure_notes;
      }
      return std::nullopt;
    }
  }
};

[[noreturn]] void bad_config(const CheckSpec& spec, const std::string& msg) {
  throw ConfigError("check '" + spec.name + "': " + msg);
}

Ctx make_ctx(const CheckSpec& spec, CheckOutcome& out) {
  if (spec.samples < 1) bad_config(spec, "samples must be positive");
  if (spec.budget < 1) bad_config(spec, "budget must be positive");
  if (!(spec.tol > 0.0)) bad_config(spec, "tol must be positive");
  if (!(spec.ball_radius > 0.0)) bad_config(spec, "ball_radius must be positive");
  if (spec.eps_grid.empty()) bad_config(spec, "eps grid must be nonempty");
  for (double e : spec.eps_grid)
    if (!(e > 0.0)) bad_config(spec, "eps grid entries must be positive");
  if (spec.lam_grid.empty()) bad_config(spec, "lam grid must be nonempty");
  for (double l : spec.lam_grid)
    if (!(l > 0.0) || !(l <= 1.0)) bad_config(spec, "lam grid entries must lie in (0, 1]");

  NormedSpace S;
  try {
    S = make_lp_space(spec.dim, spec.space_p);
  } catch (const InputError& e) {
    bad_config(spec, e.what());
  }
  YoungFunction F;
  try {
    if (spec.young == "power")
      F = power_young(spec.young_p);
    else if (spec.young == "exp")
      F = exp_young();
    else if (spec.young == "cosh")
      F = cosh_young();
    else
      bad_config(spec, "unknown kernel '" + spec.young + "' (power | exp | cosh)");
  } catch (const InputError& e) {
    bad_config(spec, e.what());
  }
  Vec center = spec.center;
  if (center.empty()) center = zeros(spec.dim);
  if (static_cast<int>(center.size()) != spec.dim)
    bad_config(spec, "center has dimension " + std::to_string(center.size()) +
                         ", space has " + std::to_string(spec.dim));
  SampleRng rng(spec.seed);
  ConvexFunction f = ZeroFn{};
  try {
    f = make_objective(S, spec.objective, rng);
  } catch (const InputError& e) {
    bad_config(spec, e.what());
  }
  ProxOptions opt;
  opt.tol = spec.tol;
  opt.budget = spec.budget;
  return Ctx{spec, out, S, F, std::move(rng), std::move(f), std::move(center), opt};
}

// Base-point balls are described around spec.center but every radius bound in
// the library is anchored at the origin; this is the containing radius.
double origin_radius(const Ctx& c) { return norm(c.S, c.center) + c.spec.ball_radius; }

// ---------------------------------------------------------------------------
// uniform continuity: ||x - y|| <= delta(eps) forces ||prox x - prox y|| <= eps

void run_uniform_continuity(Ctx& c, Recorder& rec) {
  bool lamdep;
  if (c.spec.variant.empty() || c.spec.variant == "lambda_free")
    lamdep = false;
  else if (c.spec.variant == "lambda_dependent")
    lamdep = true;
  else
    bad_config(c.spec, "variant must be lambda_free or lambda_dependent");

  auto anchor = c.solve(lamdep, 1.0, c.center, "anchor");
  if (!anchor) {
    c.out.notes.push_back("anchor solve failed; no samples drawn");
    return;
  }
  double R0 = c.dist(c.center, anchor->minimizer) + anchor->distance_bound;
  double reff = origin_radius(c);
  double max_eps = *std::max_element(c.spec.eps_grid.begin(), c.spec.eps_grid.end());
  // Perturbed base points poke at most delta <= eps/2 outside the sample ball.
  double R = std::max(prox_radius_bound(c.F, reff, R0), reff + 0.5 * max_eps);

  Modulus base = prox_uc_modulus(c.S, c.F, R);
  std::map<double, Modulus> alts;
  if (lamdep)
    for (double lam : c.spec.lam_grid) alts.emplace(lam, prox_uc_modulus_alt(c.S, c.F, R, lam));

  long ncell = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.eps_grid.size() *
                                                                    c.spec.lam_grid.size()));
  int dead_cells = 0;
  for (double eps : c.spec.eps_grid) {
    for (double lam : c.spec.lam_grid) {
      auto delta = eval_modulus(lamdep ? alts.at(lam) : base, eps);
      if (!delta) {
        ++dead_cells;
        continue;
      }
      for (long i = 0; i < ncell; ++i) {
        double s = *delta * c.rng.uniform() * (1.0 - 1e-9);
        Vec x = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
        Vec dir = c.rng.direction(c.S);
        Vec y = x;
        axpy(s, dir, y);
        auto rx = c.solve(lamdep, lam, x, "pair");
        auto ry = c.solve(lamdep, lam, y, "pair");
        if (!rx || !ry) continue;
        double d = c.dist(rx->minimizer, ry->minimizer);
        double margin = eps + rx->distance_bound + ry->distance_bound + fl(eps) - d;
        rec.record(margin, [=, &c]() {
          return json{{"eps", eps},
                      {"lam", lam},
                      {"delta", *delta},
                      {"step", s},
                      {"x", x},
                      {"y", y},
                      {"prox_x", rx->minimizer},
                      {"prox_y", ry->minimizer},
                      {"prox_dist", d},
                      {"db_x", rx->distance_bound},
                      {"db_y", ry->distance_bound},
                      {"radius", R}};
        });
      }
    }
  }
  if (dead_cells > 0)
    c.out.notes.push_back(std::to_string(dead_cells) +
                          " cell(s) skipped: modulus evaluation underflows double precision");
}

// ---------------------------------------------------------------------------
// nonexpansiveness: Hilbert space, quadratic kernel

void run_nonexpansiveness(Ctx& c, Recorder& rec) {
  if (!c.S.hilbert() || c.F.kind != YoungKind::Power || c.F.p != 2.0)
    bad_config(c.spec, "nonexpansiveness needs p = 2 and the power-2 kernel");
  bool pr;
  if (c.spec.prox_kind == "young")
    pr = false;
  else if (c.spec.prox_kind == "pr")
    pr = true;
  else
    bad_config(c.spec, "prox_kind must be young or pr here");

  long npairs = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.lam_grid.size()));
  for (long i = 0; i < npairs; ++i) {
    Vec x = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    Vec y = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    double dxy = c.dist(x, y);
    for (double lam : c.spec.lam_grid) {
      auto rx = c.solve(pr, lam, x, "pair");
      auto ry = c.solve(pr, lam, y, "pair");
      if (!rx || !ry) continue;
      double d = c.dist(rx->minimizer, ry->minimizer);
      double margin = dxy + rx->distance_bound + ry->distance_bound + fl(dxy + d) - d;
      rec.record(margin, [=]() {
        return json{{"lam", lam}, {"x", x},           {"y", y},
                    {"dist", dxy}, {"prox_dist", d},  {"db_x", rx->distance_bound},
                    {"db_y", ry->distance_bound}};
      });
    }
  }
}

// ---------------------------------------------------------------------------
// variational inequality: competitors pay the convexity surplus

void run_variational_inequality(Ctx& c, Recorder& rec) {
  std::vector<bool> kinds;
  if (c.spec.prox_kind == "young")
    kinds = {false};
  else if (c.spec.prox_kind == "pr")
    kinds = {true};
  else if (c.spec.prox_kind == "both")
    kinds = {false, true};
  else
    bad_config(c.spec, "prox_kind must be young, pr, or both");
  if (c.spec.grid_backstop && c.S.dim != 2)
    bad_config(c.spec, "grid_backstop needs dim = 2");

  const int competitors = 100;
  long nx = std::max<long>(
      1, c.spec.samples / static_cast<long>(c.spec.lam_grid.size() * competitors * kinds.size()));
  const IndicatorFn* ind = std::get_if<IndicatorFn>(&c.f);
  Vec z0 = zeros(c.S.dim);

  long skipped_far = 0, skipped_infinite = 0;
  bool degraded = false;
  int backstops = 0;
  for (long ix = 0; ix < nx; ++ix) {
    Vec x = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    for (bool pr : kinds) {
      auto anchor = c.solve(pr, 1.0, x, "anchor");
      if (!anchor) continue;
      double r0 = 1.01 * (c.dist(x, anchor->minimizer) + anchor->distance_bound) + 0.01;
      for (double lam : c.spec.lam_grid) {
        auto res = c.solve(pr, lam, x, "base");
        if (!res) continue;
        double dxh = c.dist(x, res->minimizer);
        // The ball backing the modulus must hold the proximal point; enlarge
        // when a kernel moves it past the lam = 1 reference (weaker modulus,
        // still valid).
        if (dxh + res->distance_bound > r0)
          r0 = 1.01 * (dxh + res->distance_bound) + 0.01;
        double slack, db_term;
        std::function<double(double)> surplus;
        if (!pr) {
          double cphi = 2.0 / young_density(c.F, lam);
          double r0c = r0;
          surplus = [&c, r0c, cphi, &degraded](double t) {
            return cphi * compose_or_zero(c.S, c.F, r0c, t, degraded);
          };
          db_term = compose_or_zero(c.S, c.F, r0, res->distance_bound, degraded);
          slack = 2.0 * (res->gap + db_term);
        } else {
          double r0c = r0, lamc = lam;
          surplus = [&c, r0c, lamc, &degraded](double t) {
            return 2.0 * lamc * compose_or_zero(c.S, c.F, r0c / lamc, t / lamc, degraded);
          };
          db_term = lam * compose_or_zero(c.S, c.F, r0 / lam, res->distance_bound / lam, degraded);
          slack = 2.0 * (res->gap + db_term);
        }
        for (int j = 0; j < competitors; ++j) {
          Vec y = c.rng.in_ball(c.S, z0, r0 * (1.0 - 1e-9));
          for (int k = 0; k < c.S.dim; ++k) y[k] += x[k];
          if (ind) {
            y = project(c.S, ind->set, y);
            if (c.dist(y, x) > r0) {
              ++skipped_far;
              continue;
            }
          }
          double lhs = cf_eval(c.S, c.f, y) + reg_term(c.F, lam, pr, c.dist(x, y));
          if (!std::isfinite(lhs)) {
            ++skipped_infinite;
            continue;
          }
          double sur = surplus(c.dist(y, res->minimizer));
          double margin = lhs - res->objective - sur + slack + fl(std::fabs(lhs) + std::fabs(res->objective));
          rec.record(margin, [=]() {
            return json{{"lam", lam},     {"pr", pr},
                        {"x", x},         {"y", y},
                        {"prox", res->minimizer}, {"lhs", lhs},
                        {"prox_value", res->objective}, {"surplus", sur},
                        {"slack", slack}, {"r0", r0}};
          });
        }
        if (c.spec.grid_backstop && backstops < 8) {
          ++backstops;
          auto ga = grid_agreement(c.S, c.f, c.F, lam, pr, x, *res, 2e-3);
          rec.record(ga.value_margin, [=]() {
            return json{{"grid", "value"},
                        {"lam", lam},
                        {"pr", pr},
                        {"x", x},
                        {"grid_point", ga.grid_point},
                        {"grid_value", ga.grid_value},
                        {"prox_value", res->objective},
                        {"gap", res->gap}};
          });
          rec.record(ga.distance_margin, [=]() {
            return json{{"grid", "distance"},
                        {"lam", lam},
                        {"pr", pr},
                        {"x", x},
                        {"grid_point", ga.grid_point},
                        {"prox", res->minimizer},
                        {"localization", ga.localization},
                        {"distance_bound", res->distance_bound}};
          });
        }
      }
    }
  }
  if (skipped_far > 0)
    c.out.notes.push_back(std::to_string(skipped_far) +
                          " competitor(s) skipped: projection left the certificate ball");
  if (skipped_infinite > 0)
    c.out.notes.push_back(std::to_string(skipped_infinite) +
                          " competitor(s) skipped: objective value not finite");
  if (degraded)
    c.out.notes.push_back(
        "some modulus terms underflowed double precision and were dropped to zero");
}

// ---------------------------------------------------------------------------
// Hoelder continuity of the proximal map for matching power kernels

void run_hoelder(Ctx& c, Recorder& rec) {
  if (c.F.kind != YoungKind::Power || c.F.p != c.S.p)
    bad_config(c.spec, "needs the power kernel with exponent equal to the space exponent");
  double r = c.spec.hoelder_r;
  if (!(r >= 1.0)) bad_config(c.spec, "hoelder_r must be at least 1");
  bool pr = c.spec.prox_kind == "pr";  // identical maps for power kernels

  auto anchor = c.solve(pr, 1.0, c.center, "anchor");
  if (!anchor) {
    c.out.notes.push_back("anchor solve failed; no samples drawn");
    return;
  }
  double R0 = c.dist(c.center, anchor->minimizer) + anchor->distance_bound;
  double reff = origin_radius(c);
  double need = std::max(reff, prox_radius_bound(c.F, reff, R0));
  if (r < need)
    bad_config(c.spec, "hoelder_r=" + num(r) + " cannot contain every proximal point; use at least " +
                           num(need));
  double A = power_type_constant(c.S);
  double L = hoelder_constant(A, c.S.p, r);

  long npairs = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.lam_grid.size()));
  for (long i = 0; i < npairs; ++i) {
    Vec x = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    Vec y;
    if (c.rng.uniform() < 0.3) {
      // near-coincident pairs exercise the d^(1/p) branch
      double t = c.spec.ball_radius * std::pow(10.0, c.rng.uniform(-6.0, -1.0));
      t = std::min(t, std::max(0.0, (r - norm(c.S, x)) * 0.999));
      Vec dir = c.rng.direction(c.S);
      y = x;
      axpy(t, dir, y);
    } else {
      y = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    }
    double dxy = c.dist(x, y);
    double bound = std::max(2.0 * dxy, L * std::pow(dxy, 1.0 / c.S.p));
    for (double lam : c.spec.lam_grid) {
      auto rx = c.solve(pr, lam, x, "pair");
      auto ry = c.solve(pr, lam, y, "pair");
      if (!rx || !ry) continue;
      double d = c.dist(rx->minimizer, ry->minimizer);
      double margin = bound + rx->distance_bound + ry->distance_bound + fl(bound) - d;
      rec.record(margin, [=]() {
        return json{{"lam", lam},   {"x", x},
                    {"y", y},       {"dist", dxy},
                    {"bound", bound}, {"prox_dist", d},
                    {"constant", L},  {"db_x", rx->distance_bound},
                    {"db_y", ry->distance_bound}};
      });
    }
  }
}

// ---------------------------------------------------------------------------
// monotone behaviour along a shrinking step grid

void run_sweep(Ctx& c, Recorder& rec) {
  const auto& lams = c.spec.lam_grid;
  if (lams.size() < 2) bad_config(c.spec, "needs at least two steps in lam_grid");
  for (std::size_t k = 1; k < lams.size(); ++k)
    if (!(lams[k] < lams[k - 1])) bad_config(c.spec, "lam_grid must be strictly decreasing");

  long nx = std::max<long>(1, c.spec.samples / static_cast<long>(2 * (lams.size() - 1)));
  for (long i = 0; i < nx; ++i) {
    Vec x = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    SweepResult s;
    try {
      s = lambda_sweep(c.S, c.f, c.F, x, lams, c.opt);
    } catch (const SolverError& e) {
      c.out.solver_failures += 1;
      if (c.failure_notes < 4) {
        c.out.notes.push_back("solver budget exhausted (sweep, gap " + num(e.gap) + ")");
        ++c.failure_notes;
      }
      continue;
    }
    for (std::size_t k = 0; k + 1 < s.entries.size(); ++k) {
      const auto& a = s.entries[k];
      const auto& b = s.entries[k + 1];
      // mirrors the slack lambda_sweep itself applies to its verdict flags
      double slack = 2.0 * (a.distance_bound + b.distance_bound + a.gap + b.gap) +
                     1e-12 * (1.0 + std::fabs(a.value) + std::fabs(b.value));
      double m_dist = a.distance + slack - b.distance;
      double m_val = b.value + slack - a.value;
      auto builder = [=]() {
        return json{{"x", x},
                    {"lam_hi", a.lam},
                    {"lam_lo", b.lam},
                    {"dist_hi", a.distance},
                    {"dist_lo", b.distance},
                    {"value_hi", a.value},
                    {"value_lo", b.value},
                    {"slack", slack}};
      };
      rec.record(m_dist, builder);
      rec.record(m_val, builder);
    }
  }
}

// ---------------------------------------------------------------------------
// vanishing steps drive the proximal point onto the metric projection

void run_projection_convergence(Ctx& c, Recorder& rec) {
  const IndicatorFn* ind = std::get_if<IndicatorFn>(&c.f);
  if (!ind) bad_config(c.spec, "needs an indicator objective (ball | box)");
  auto probe = project_detail(c.S, ind->set, c.center);
  if (!probe.exact)
    bad_config(c.spec, "set '" + set_name(ind->set) + "' has no exact projection for p=" +
                           num(c.S.p));
  bool pr = c.spec.prox_kind != "young";
  Modulus smod = space_modulus(c.S);

  long nx = std::max<long>(1, c.spec.samples / static_cast<long>(4 * c.spec.eps_grid.size()));
  long trivial = 0;
  for (long i = 0; i < nx; ++i) {
    Vec x = c.rng.in_ball(c.S, c.center, c.spec.ball_radius);
    auto pd = project_detail(c.S, ind->set, x);
    double beta = pd.distance;
    bool feasible = beta <= 1e-12;
    if (feasible) ++trivial;
    for (double eps : c.spec.eps_grid) {
      double cap;
      if (feasible) {
        cap = 0.5;  // the threshold degenerates on feasible points; any step works
      } else {
        cap = lambda_threshold(c.F, smod, eps, beta, 1.0);
      }
      for (double frac : {0.5, 0.1}) {
        double lam = cap * frac;
        if (!(lam > 0.0)) continue;
        auto res = c.solve(pr, lam, x, "small step");
        if (!res) continue;
        double d = c.dist(res->minimizer, pd.point);
        double m1 = eps + res->distance_bound + fl(eps) - d;
        double leftover = project_detail(c.S, ind->set, res->minimizer).distance;
        double m2 = res->distance_bound + fl(1.0 + leftover) - leftover;
        auto builder = [=]() {
          return json{{"eps", eps},       {"lam", lam},
                      {"x", x},           {"projection", pd.point},
                      {"prox", res->minimizer}, {"dist_to_projection", d},
                      {"dist_to_set", leftover}, {"threshold", cap},
                      {"beta", beta}};
        };
        rec.record(m1, builder);
        rec.record(m2, builder);
      }
    }
  }
  if (trivial > 0)
    c.out.notes.push_back(std::to_string(trivial) +
                          " base point(s) already feasible; threshold cells trivial there");
}

// ---------------------------------------------------------------------------
// direct midpoint-gap tests of the claimed moduli

void run_modulus_space(Ctx& c, Recorder& rec) {
  long ncell = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.eps_grid.size()));
  Vec z0 = zeros(c.S.dim);
  int vacuous = 0;
  for (double eps : c.spec.eps_grid) {
    if (eps > 2.0 * (1.0 - 1e-9)) {
      ++vacuous;
      continue;
    }
    for (long i = 0; i < ncell; ++i) {
      auto [u, v] = c.rng.separated_pair(c.S, z0, 1.0, eps);
      double sep = c.dist(u, v);
      double gap = 1.0 - norm(c.S, midpoint(u, v));
      double margin = gap - delta_X(c.S, sep) + fl(1.0);
      rec.record(margin, [=, &c]() {
        return json{{"eps", eps}, {"u", u}, {"v", v}, {"sep", sep},
                    {"gap", gap}, {"delta", delta_X(c.S, sep)}};
      });
    }
  }
  if (vacuous > 0)
    c.out.notes.push_back(std::to_string(vacuous) +
                          " eps cell(s) vacuous: unit-ball pairs cannot separate that far");
}

void run_modulus_compose(Ctx& c, Recorder& rec) {
  double r = c.spec.ball_radius;
  long ncell = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.eps_grid.size()));
  Vec z0 = zeros(c.S.dim);
  bool degraded = false;
  int vacuous = 0;
  auto h = [&](const Vec& y) { return young_eval(c.F, norm(c.S, y)); };
  for (double eps : c.spec.eps_grid) {
    if (eps > 2.0 * r * (1.0 - 1e-9)) {
      ++vacuous;
      continue;
    }
    for (long i = 0; i < ncell; ++i) {
      auto [u, v] = c.rng.separated_pair(c.S, z0, r, eps);
      double sep = c.dist(u, v);
      double delta = compose_or_zero(c.S, c.F, r, sep, degraded);
      double gap = 0.5 * h(u) + 0.5 * h(v) - h(midpoint(u, v));
      double margin = gap - delta + fl(std::fabs(h(u)) + std::fabs(h(v)));
      rec.record(margin, [=]() {
        return json{{"eps", eps}, {"u", u}, {"v", v}, {"sep", sep},
                    {"gap", gap}, {"delta", delta}};
      });
    }
  }
  if (vacuous > 0)
    c.out.notes.push_back(std::to_string(vacuous) + " eps cell(s) vacuous for ball radius " +
                          num(r));
  if (degraded)
    c.out.notes.push_back("some modulus values underflowed double precision; tested against 0");
}

void run_modulus_boxes(Ctx& c, Recorder& rec, bool psi_variant) {
  std::function<double(double)> h_of_t;
  Modulus M;
  if (!psi_variant) {
    double A = power_type_constant(c.S);
    M = power_norm_modulus(A, c.S.p);
    double p = c.S.p;
    h_of_t = [p](double t) { return std::pow(t, p) / p; };
  } else {
    PsiFunction Psi;
    if (c.spec.young == "power")
      Psi = power_psi(c.spec.young_p);
    else if (c.spec.young == "exp")
      Psi = exp_psi();
    else
      Psi = cosh_psi();
    try {
      M = psi_compose_modulus(c.S, Psi, stock_witness(c.S, c.F));
    } catch (const InputError& e) {
      bad_config(c.spec, e.what());
    }
    h_of_t = Psi.eval;
  }
  long ncell = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.eps_grid.size()));
  bool degraded = false;
  long forced = 0;
  for (double eps : c.spec.eps_grid) {
    for (long i = 0; i < ncell; ++i) {
      double R = (i % 2 == 0) ? c.spec.ball_radius : 4.0 * c.spec.ball_radius;
      Vec u, v;
      double sep = 0.0;
      bool ok = false;
      for (int t = 0; t < 400 && !ok; ++t) {
        u = c.rng.box(c.S.dim, -R, R);
        v = c.rng.box(c.S.dim, -R, R);
        sep = c.dist(u, v);
        ok = sep >= eps;
      }
      if (!ok) {
        ++forced;
        continue;
      }
      double delta;
      try {
        delta = M(sep);
        if (!std::isfinite(delta) || delta < 0.0) {
          degraded = true;
          delta = 0.0;
        }
      } catch (const InputError&) {
        degraded = true;
        delta = 0.0;
      }
      double hu = h_of_t(norm(c.S, u)), hv = h_of_t(norm(c.S, v));
      double gap = 0.5 * hu + 0.5 * hv - h_of_t(norm(c.S, midpoint(u, v)));
      double margin = gap - delta + fl(std::fabs(hu) + std::fabs(hv));
      rec.record(margin, [=]() {
        return json{{"eps", eps}, {"box", R},   {"u", u},        {"v", v},
                    {"sep", sep}, {"gap", gap}, {"delta", delta}};
      });
    }
  }
  if (forced > 0)
    c.out.notes.push_back(std::to_string(forced) +
                          " draw(s) skipped: box pairs never reached the separation");
  if (degraded)
    c.out.notes.push_back("some modulus values underflowed double precision; tested against 0");
}

void run_modulus_renorm(Ctx& c, Recorder& rec) {
  RenormResult rn;
  if (c.S.hilbert()) {
    NormedSpace S = c.S;
    rn = renorm(
        c.S, [S](const Vec& x) { return 0.5 * norm(S, x) * norm(S, x); },
        [](double e) { return e * e / 8.0; },
        [](double t) { return std::min(std::sqrt(2.0 * t), 1.0 - 1e-9); }, 0.45);
  } else if (c.S.p == 4.0) {
    NormedSpace S = c.S;
    rn = renorm(
        c.S,
        [S](const Vec& x) {
          double n = norm(S, x);
          return 0.25 * n * n * n * n;
        },
        [](double e) { return std::pow(e, 4.0) / 262144.0; },
        [](double t) { return std::pow(4.0 * t, 0.25); }, 0.2);
  } else {
    bad_config(c.spec, "renorm stock instances cover p = 2 and p = 4 only");
  }

  long half = std::max<long>(1, c.spec.samples / 2);
  // sandwich claims, tested at the lenient bracket ends
  long ndist = std::max<long>(1, half / 2);
  for (long i = 0; i < ndist; ++i) {
    Vec x = c.rng.box(c.S.dim, -2.0, 2.0);
    double n = norm(c.S, x);
    if (n < 1e-9) continue;
    GaugeBracket g = rn.gauge(x);
    double m_upper = (1.0 / rn.beta) * n - g.lower + fl(g.upper);
    double m_lower = g.upper - (1.0 / rn.alpha) * n + fl(g.upper);
    auto builder = [=]() {
      return json{{"x", x},
                  {"norm", n},
                  {"gauge_lo", g.lower},
                  {"gauge_hi", g.upper},
                  {"alpha", rn.alpha},
                  {"beta", rn.beta}};
    };
    rec.record(m_upper, builder);
    rec.record(m_lower, builder);
  }

  // midpoint gaps of the new unit ball: hypotheses certified at the safe
  // bracket ends, the claim tested at the lenient end
  Vec z0 = zeros(c.S.dim);
  long ncell = std::max<long>(1, half / static_cast<long>(c.spec.eps_grid.size()));
  long unreached = 0;
  for (double eps : c.spec.eps_grid) {
    for (long i = 0; i < ncell; ++i) {
      Vec u, v;
      double seplo = 0.0;
      bool ok = false;
      for (int t = 0; t < 60 && !ok; ++t) {
        Vec u0 = c.rng.in_ball(c.S, z0, 1.0);
        if (norm(c.S, u0) < 1e-9) continue;
        GaugeBracket gu = rn.gauge(u0);
        if (!(gu.upper > 1e-12)) continue;
        u = scale(c.rng.uniform(0.9, 1.0) / gu.upper, u0);  // new-norm length <= 1
        Vec v0;
        if (t >= 20) {
          v0 = scale(-1.0, u0);  // the stock bodies are symmetric
          for (auto& w : v0) w += 0.02 * (c.rng.uniform() - 0.5);
        } else {
          v0 = c.rng.in_ball(c.S, z0, 1.0);
        }
        if (norm(c.S, v0) < 1e-9) continue;
        GaugeBracket gv = rn.gauge(v0);
        if (!(gv.upper > 1e-12)) continue;
        v = scale(c.rng.uniform(0.9, 1.0) / gv.upper, v0);
        seplo = rn.gauge(sub(u, v)).lower;
        ok = seplo >= eps;
      }
      if (!ok) {
        ++unreached;
        continue;
      }
      double delta = rn.modulus(seplo);
      GaugeBracket gm = rn.gauge(midpoint(u, v));
      double margin = (1.0 - delta) - gm.lower + fl(1.0);
      rec.record(margin, [=]() {
        return json{{"eps", eps},          {"u", u},
                    {"v", v},              {"sep_lower", seplo},
                    {"mid_gauge_lo", gm.lower}, {"delta", delta}};
      });
    }
  }
  if (unreached > 0)
    c.out.notes.push_back(std::to_string(unreached) +
                          " draw(s) skipped: pairs never reached the separation in the new norm");
}

void run_modulus_inequalities(Ctx& c, Recorder& rec) {
  const std::string& v = c.spec.variant;
  if (v == "space")
    run_modulus_space(c, rec);
  else if (v == "compose")
    run_modulus_compose(c, rec);
  else if (v == "power_norm")
    run_modulus_boxes(c, rec, false);
  else if (v == "psi_compose")
    run_modulus_boxes(c, rec, true);
  else if (v == "renorm")
    run_modulus_renorm(c, rec);
  else
    bad_config(c.spec,
               "variant must be one of space | compose | power_norm | psi_compose | renorm");
}

// ---------------------------------------------------------------------------
// monotonicity of the duality map increments against the converted modulus

void run_duality_monotonicity(Ctx& c, Recorder& rec) {
  double r = c.spec.ball_radius;
  long ncell = std::max<long>(1, c.spec.samples / static_cast<long>(c.spec.eps_grid.size()));
  Vec z0 = zeros(c.S.dim);
  bool degraded = false;
  int vacuous = 0;
  for (double eps : c.spec.eps_grid) {
    if (eps > 2.0 * r * (1.0 - 1e-9)) {
      ++vacuous;
      continue;
    }
    for (long i = 0; i < ncell; ++i) {
      auto [u, v] = c.rng.separated_pair(c.S, z0, r, eps);
      if (norm(c.S, u) < 1e-12 || norm(c.S, v) < 1e-12) continue;
      Vec xs = duality_element(c.S, young_density(c.F, norm(c.S, u)), u);
      Vec ys = duality_element(c.S, young_density(c.F, norm(c.S, v)), v);
      Vec uv = sub(u, v);
      double sep = norm(c.S, uv);
      double lhs = dot(sub(xs, ys), uv);
      double gamma = gamma_from_delta(compose_or_zero(c.S, c.F, r, sep, degraded));
      double budget = fl((dual_norm(c.S, xs) + dual_norm(c.S, ys)) * sep);
      double margin = lhs - gamma + budget;
      rec.record(margin, [=]() {
        return json{{"eps", eps},   {"u", u},         {"v", v},     {"sep", sep},
                    {"pairing", lhs}, {"gamma", gamma}, {"u_star", xs}, {"v_star", ys}};
      });
    }
  }
  if (vacuous > 0)
    c.out.notes.push_back(std::to_string(vacuous) + " eps cell(s) vacuous for ball radius " +
                          num(r));
  if (degraded)
    c.out.notes.push_back("some modulus values underflowed double precision; tested against 0");
}

}  // namespace

// ---------------------------------------------------------------------------

Vec SampleRng::direction(const NormedSpace& S) {
  for (;;) {
    Vec v = box(S.dim, -1.0, 1.0);
    double n = norm(S, v);
    if (n > 1e-6) {
      for (auto& x : v) x /= n;
      return v;
    }
  }
}

Vec SampleRng::in_ball(const NormedSpace& S, const Vec& center, double r) {
  double u = uniform();
  double t;
  if (u < 0.25)
    t = uniform(0.97, 1.0);
  else if (u < 0.35)
    t = uniform(0.0, 0.05);
  else
    t = std::pow(uniform(), 1.0 / S.dim);
  Vec d = direction(S);
  Vec x = center;
  axpy(t * r, d, x);
  return x;
}

std::pair<Vec, Vec> SampleRng::separated_pair(const NormedSpace& S, const Vec& center, double r,
                                              double sep) {
  for (int t = 0; t < 1200; ++t) {
    Vec a, b;
    if (t >= 600 || uniform() < 0.35) {
      Vec d = direction(S);
      a = center;
      axpy(uniform(0.6, 1.0) * r, d, a);
      b = center;
      axpy(-uniform(0.6, 1.0) * r, d, b);
    } else {
      a = in_ball(S, center, r);
      b = in_ball(S, center, r);
    }
    if (norm(S, sub(a, b)) >= sep) return {a, b};
  }
  // antipodal fallback; callers filter separations past the diameter
  Vec d = direction(S);
  Vec a = center, b = center;
  axpy(r * (1.0 - 1e-12), d, a);
  axpy(-r * (1.0 - 1e-12), d, b);
  return {a, b};
}

std::string check_kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::UniformContinuity: return "uniform_continuity";
    case CheckKind::Nonexpansiveness: return "nonexpansiveness";
    case CheckKind::VariationalInequality: return "variational_inequality";
    case CheckKind::HoelderContinuity: return "hoelder_continuity";
    case CheckKind::SweepMonotonicity: return "sweep_monotonicity";
    case CheckKind::ProjectionConvergence: return "projection_convergence";
    case CheckKind::ModulusInequalities: return "modulus_inequalities";
    case CheckKind::DualityMonotonicity: return "duality_monotonicity";
  }
  return "unknown";
}

std::vector<CheckKind> all_check_kinds() {
  return {CheckKind::UniformContinuity,      CheckKind::Nonexpansiveness,
          CheckKind::VariationalInequality,  CheckKind::HoelderContinuity,
          CheckKind::SweepMonotonicity,      CheckKind::ProjectionConvergence,
          CheckKind::ModulusInequalities,    CheckKind::DualityMonotonicity};
}

std::optional<CheckKind> parse_check_kind(const std::string& name) {
  for (CheckKind k : all_check_kinds())
    if (check_kind_name(k) == name) return k;
  return std::nullopt;
}

std::string check_kind_summary(CheckKind k) {
  switch (k) {
    case CheckKind::UniformContinuity:
      return "base points closer than delta(eps) keep proximal points within eps";
    case CheckKind::Nonexpansiveness:
      return "p=2 with the quadratic kernel: the proximal map never expands distances";
    case CheckKind::VariationalInequality:
      return "every competitor pays the certified convexity surplus over the proximal value";
    case CheckKind::HoelderContinuity:
      return "displacement of proximal points bounded by max(2d, L*d^(1/p)) on a fixed ball";
    case CheckKind::SweepMonotonicity:
      return "smaller steps pull the proximal point inward and raise the objective part";
    case CheckKind::ProjectionConvergence:
      return "steps under the certified threshold land within eps of the metric projection";
    case CheckKind::ModulusInequalities:
      return "sampled midpoint gaps dominate the claimed convexity moduli";
    case CheckKind::DualityMonotonicity:
      return "duality-map increments dominate the gamma converted from the composed modulus";
  }
  return "";
}

ConvexFunction make_objective(const NormedSpace& S, const std::string& kind, SampleRng& rng) {
  const int n = S.dim;
  if (kind == "zero") return ZeroFn{};
  if (kind == "quadratic") {
    Quadratic q;
    q.Q.assign(n, Vec(n, 0.0));
    Vec diag(n);
    for (auto& d : diag) d = rng.uniform(0.3, 1.5);
    Vec v = rng.box(n, -1.0, 1.0);
    double c = rng.uniform(0.1, 0.5);
    for (int i = 0; i < n; ++i) {
      // grouped so Q[i][j] and Q[j][i] round identically
      for (int j = 0; j < n; ++j) q.Q[i][j] = c * (v[i] * v[j]);
      q.Q[i][i] += diag[i];
    }
    q.b = rng.box(n, -0.5, 0.5);
    return q;
  }
  if (kind == "l1") return L1Norm{rng.uniform(0.2, 0.8)};
  if (kind == "ball") {
    Ball B;
    B.center = rng.box(n, -0.3, 0.3);
    B.radius = rng.uniform(0.5, 1.2);
    return IndicatorFn{B};
  }
  if (kind == "box") {
    Box B;
    B.lower.resize(n);
    B.upper.resize(n);
    for (int i = 0; i < n; ++i) {
      B.lower[i] = rng.uniform(-1.0, -0.1);
      B.upper[i] = rng.uniform(0.1, 1.0);
    }
    return IndicatorFn{B};
  }
  if (kind == "maxaffine") {
    MaxAffine m;
    for (int r = 0; r < 3; ++r) m.rows.push_back(rng.box(n, -1.0, 1.0));
    m.offsets = rng.box(3, -0.5, 0.5);
    return m;
  }
  throw InputError("unknown objective '" + kind + "' (zero | quadratic | l1 | ball | box | maxaffine)");
}

CheckOutcome run_check(const CheckSpec& spec) {
  auto t0 = std::chrono::steady_clock::now();
  CheckOutcome out;
  out.name = spec.name;
  out.kind = spec.kind;
  Ctx ctx = make_ctx(spec, out);
  Recorder rec{out, json(), false};
  bool hard_fail = false;
  try {
    switch (spec.kind) {
      case CheckKind::UniformContinuity: run_uniform_continuity(ctx, rec); break;
      case CheckKind::Nonexpansiveness: run_nonexpansiveness(ctx, rec); break;
      case CheckKind::VariationalInequality: run_variational_inequality(ctx, rec); break;
      case CheckKind::HoelderContinuity: run_hoelder(ctx, rec); break;
      case CheckKind::SweepMonotonicity: run_sweep(ctx, rec); break;
      case CheckKind::ProjectionConvergence: run_projection_convergence(ctx, rec); break;
      case CheckKind::ModulusInequalities: run_modulus_inequalities(ctx, rec); break;
      case CheckKind::DualityMonotonicity: run_duality_monotonicity(ctx, rec); break;
    }
  } catch (const InputError& e) {
    hard_fail = true;
    out.notes.push_back(std::string("aborted: ") + e.what());
  }
  if (out.samples == 0 && !hard_fail) out.notes.push_back("no samples recorded");
  out.pass = !hard_fail && out.violations == 0 && out.solver_failures == 0;
  out.witness_json = rec.worst.is_null() ? std::string() : rec.worst.dump();
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

GridAgreement grid_agreement(const NormedSpace& S, const ConvexFunction& f,
                             const YoungFunction& F, double lam, bool pr, const Vec& x,
                             const ProxResult& result, double resolution) {
  if (!(resolution > 0.0)) throw InputError("grid_agreement requires resolution > 0");
  if (!(lam > 0.0) || !(lam <= 1.0)) throw InputError("grid_agreement requires lam in (0, 1]");
  const Vec& xh = result.minimizer;
  const int dim = S.dim;
  if (static_cast<int>(x.size()) != dim || static_cast<int>(xh.size()) != dim)
    throw InputError("grid_agreement: dimension mismatch");
  double halfw = std::max(result.distance_bound + 3.0 * resolution, 20.0 * resolution);
  long G = static_cast<long>(std::floor(2.0 * halfw / resolution)) + 1;
  double npoints = std::pow(static_cast<double>(G), dim);
  if (G > 6000 || npoints > 4.0e7)
    throw InputError("grid_agreement: box needs about " + std::to_string(static_cast<long long>(npoints)) +
                     " points; coarsen the resolution or tighten the certificate");

  std::vector<Vec> axis(dim), apow(dim);
  for (int i = 0; i < dim; ++i) {
    axis[i].resize(G);
    apow[i].resize(G);
    for (long j = 0; j < G; ++j) {
      double g = xh[i] - halfw + resolution * static_cast<double>(j);
      axis[i][j] = g;
      double d = std::fabs(x[i] - g);
      apow[i][j] = (S.p == 2.0) ? d * d : std::pow(d, S.p);
    }
  }

  // regularizer from the p-th power of the distance; power kernels reduce to
  // exponent ratios so the hot loop avoids pow almost everywhere
  std::function<double(double)> reg_of_spow;
  if (F.kind == YoungKind::Power) {
    double ratio = F.p / S.p;
    double coef = pr ? std::pow(lam, 1.0 - F.p) / F.p : 1.0 / (F.p * young_density(F, lam));
    if (ratio == 1.0)
      reg_of_spow = [coef](double sp) { return coef * sp; };
    else if (ratio == 2.0)
      reg_of_spow = [coef](double sp) { return coef * sp * sp; };
    else if (ratio == 0.5)
      reg_of_spow = [coef](double sp) { return coef * std::sqrt(sp); };
    else
      reg_of_spow = [coef, ratio](double sp) { return coef * std::pow(sp, ratio); };
  } else {
    double ip = 1.0 / S.p;
    YoungFunction Fc = F;
    bool sq = S.p == 2.0;
    bool q4 = S.p == 4.0;  // sqrt(sqrt()) beats pow in the hot loop
    reg_of_spow = [Fc, lam, pr, ip, sq, q4](double sp) {
      double t = sq ? std::sqrt(sp) : q4 ? std::sqrt(std::sqrt(sp)) : std::pow(sp, ip);
      return reg_term(Fc, lam, pr, t);
    };
  }

  auto feval = [&](const Vec& y) { return cf_eval(S, f, y); };

  std::vector<long> idx(dim, 0);
  Vec y(dim);
  auto point_value = [&](const std::vector<long>& id) {
    double sp = 0.0;
    for (int i = 0; i < dim; ++i) {
      sp += apow[i][id[i]];
      y[i] = axis[i][id[i]];
    }
    double fv = feval(y);
    if (!std::isfinite(fv)) return fv;
    return fv + reg_of_spow(sp);
  };
  auto advance = [&]() {
    for (int i = 0; i < dim; ++i) {
      if (++idx[i] < G) return true;
      idx[i] = 0;
    }
    return false;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<long> best_idx(dim, 0);
  do {
    double h = point_value(idx);
    if (h < best) {
      best = h;
      best_idx = idx;
    }
  } while (advance());
  if (!std::isfinite(best))
    throw InputError("grid_agreement: no feasible grid point inside the box");

  GridAgreement ga;
  ga.resolution = resolution;
  ga.grid_value = best;
  ga.grid_point.resize(dim);
  for (int i = 0; i < dim; ++i) ga.grid_point[i] = axis[i][best_idx[i]];

  // local slope estimate at the grid argmin, for the sublevel threshold
  double Lfin = 0.0;
  bool any_finite = false;
  for (int i = 0; i < dim; ++i) {
    for (int step : {-1, 1}) {
      long j = best_idx[i] + step;
      if (j < 0 || j >= G) continue;
      std::vector<long> id = best_idx;
      id[i] = j;
      double h = point_value(id);
      if (std::isfinite(h)) {
        Lfin = std::max(Lfin, std::fabs(h - best) / resolution);
        any_finite = true;
      }
    }
  }
  double dround = (any_finite ? 2.0 * std::sqrt(static_cast<double>(dim)) * resolution * Lfin
                              : 0.0) +
                  fl(std::fabs(best));
  double threshold = result.objective + dround;

  // radius of the grid's own near-optimal region: the nearest grid neighbour
  // of the true minimizer lies in this sublevel set, so the distance claim
  // must concede it
  double rloc = 0.0;
  std::fill(idx.begin(), idx.end(), 0);
  do {
    double h = point_value(idx);
    if (h <= threshold) {
      double sp = 0.0;
      for (int i = 0; i < dim; ++i) {
        double d = std::fabs(axis[i][idx[i]] - ga.grid_point[i]);
        sp += (S.p == 2.0) ? d * d : std::pow(d, S.p);
      }
      rloc = std::max(rloc, std::pow(sp, 1.0 / S.p));
    }
  } while (advance());
  ga.localization = rloc;

  double scale = std::fabs(best) + std::fabs(result.objective);
  ga.value_margin = best - (result.objective - result.gap) + fl(scale);
  double dd = norm(S, sub(ga.grid_point, xh));
  ga.distance_margin = result.distance_bound +
                       resolution * std::pow(static_cast<double>(dim), 1.0 / S.p) + rloc - dd +
                       fl(1.0);
  return ga;
}

}  // namespace proxuc
