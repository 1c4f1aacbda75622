#include "proxuc/prox.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

namespace proxuc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const NormedSpace& S, const Vec& v, const char* what) {
  if (int(v.size()) != S.dim)
    throw InputError(std::string(what) + ": dimension mismatch");
}

void validate_function(const NormedSpace& S, const ConvexFunction& f) {
  if (const auto* q = std::get_if<Quadratic>(&f)) {
    if (int(q->Q.size()) != S.dim || int(q->b.size()) != S.dim)
      throw InputError("quadratic objective: dimension mismatch");
    double scale = 1e-300;
    for (const auto& row : q->Q) {
      if (int(row.size()) != S.dim) throw InputError("quadratic objective: ragged matrix");
      for (double v : row) scale = std::max(scale, std::fabs(v));
    }
    for (int i = 0; i < S.dim; ++i)
      for (int j = i + 1; j < S.dim; ++j)
        if (std::fabs(q->Q[i][j] - q->Q[j][i]) > 1e-12 * scale)
          throw InputError("quadratic objective: matrix must be symmetric");
  } else if (const auto* l = std::get_if<L1Norm>(&f)) {
    if (!(l->weight > 0.0)) throw InputError("l1 objective: weight must be positive");
  } else if (const auto* m = std::get_if<MaxAffine>(&f)) {
    if (m->rows.empty()) throw InputError("max-affine objective: needs at least one row");
    if (m->rows.size() > 16)
      throw InputError("max-affine objective: exact enumeration caps rows at 16");
    if (m->offsets.size() != m->rows.size())
      throw InputError("max-affine objective: offsets/rows mismatch");
    for (const auto& r : m->rows)
      if (int(r.size()) != S.dim) throw InputError("max-affine objective: row dimension mismatch");
  }
}

double reg_value(const YoungFunction& F, double lam, bool pr, double t) {
  return pr ? lam * young_eval(F, t / lam) : young_eval(F, t) / young_density(F, lam);
}

// Euclidean gradient of the ambient norm away from zero.
Vec norming_direction(const NormedSpace& S, const Vec& z, double n) {
  Vec u(z.size());
  if (S.p == 2.0) {
    for (std::size_t i = 0; i < z.size(); ++i) u[i] = z[i] / n;
    return u;
  }
  double c = std::pow(n, S.p - 1.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double a = std::fabs(z[i]);
    u[i] = (z[i] > 0.0 ? 1.0 : -1.0) * std::pow(a, S.p - 1.0) / c;
    if (a == 0.0) u[i] = 0.0;
  }
  return u;
}

// d/dy of the regularization term at y; z = x - y.
Vec reg_gradient(const NormedSpace& S, const YoungFunction& F, double lam, bool pr,
                 const Vec& x, const Vec& y) {
  Vec z = sub(x, y);
  double n = norm(S, z);
  if (n == 0.0) return Vec(z.size(), 0.0);
  double c = pr ? young_density(F, n / lam) : young_density(F, n) / young_density(F, lam);
  return scale(-c, norming_direction(S, z, n));
}

}  // namespace

std::string cf_name(const ConvexFunction& f) {
  if (std::holds_alternative<ZeroFn>(f)) return "zero";
  if (std::holds_alternative<Quadratic>(f)) return "quadratic";
  if (const auto* i = std::get_if<IndicatorFn>(&f)) return "indicator(" + set_name(i->set) + ")";
  if (std::holds_alternative<L1Norm>(f)) return "l1";
  return "maxaffine";
}

double cf_eval(const NormedSpace& S, const ConvexFunction& f, const Vec& y) {
  check_dim(S, y, "cf_eval");
  if (std::holds_alternative<ZeroFn>(f)) return 0.0;
  if (const auto* q = std::get_if<Quadratic>(&f))
    return 0.5 * dot(y, linalg::mat_vec(q->Q, y)) + dot(q->b, y);
  if (const auto* i = std::get_if<IndicatorFn>(&f))
    return set_contains(S, i->set, y, 1e-9) ? 0.0 : kInf;
  if (const auto* l = std::get_if<L1Norm>(&f)) {
    double s = 0.0;
    for (double v : y) s += std::fabs(v);
    return l->weight * s;
  }
  const auto& m = std::get<MaxAffine>(f);
  double best = -kInf;
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    best = std::max(best, dot(m.rows[i], y) + m.offsets[i]);
  return best;
}

Vec cf_subgradient(const NormedSpace& S, const ConvexFunction& f, const Vec& y) {
  check_dim(S, y, "cf_subgradient");
  if (const auto* q = std::get_if<Quadratic>(&f))
    return add(linalg::mat_vec(q->Q, y), q->b);
  if (const auto* l = std::get_if<L1Norm>(&f)) {
    Vec g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      g[i] = l->weight * (y[i] > 0.0 ? 1.0 : (y[i] < 0.0 ? -1.0 : 0.0));
    return g;
  }
  if (const auto* m = std::get_if<MaxAffine>(&f)) {
    std::size_t arg = 0;
    double best = -kInf;
    for (std::size_t i = 0; i < m->rows.size(); ++i) {
      double v = dot(m->rows[i], y) + m->offsets[i];
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    return m->rows[arg];
  }
  return Vec(y.size(), 0.0);  // zero objective and feasible indicator points
}

Vec cf_domain_point(const NormedSpace& S, const ConvexFunction& f) {
  if (const auto* i = std::get_if<IndicatorFn>(&f)) {
    if (const auto* b = std::get_if<Ball>(&i->set)) return b->center;
    if (const auto* b = std::get_if<Box>(&i->set)) return midpoint(b->lower, b->upper);
    if (const auto* a = std::get_if<AffineSubspace>(&i->set)) return a->point;
    return project(S, i->set, Vec(S.dim, 0.0));  // halfspace
  }
  return Vec(S.dim, 0.0);
}

namespace {

// argmin_z t * max_i(<a_i, z> + b_i) + 0.5 ||z - v||_2^2, exact. Every
// active-set guess that clears the sign and feasibility checks is a KKT
// certificate, so the first hit is the optimum.
Vec maxaffine_prox(const MaxAffine& ma, double t, const Vec& v) {
  const int m = int(ma.rows.size());
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    int k = std::popcount(mask);
    std::vector<int> idx;
    idx.reserve(k);
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    // unknowns: mu_0..mu_{k-1}, s
    linalg::Mat A(k + 1, Vec(k + 1, 0.0));
    Vec rhs(k + 1, 0.0);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) A[r][c] = t * dot(ma.rows[idx[r]], ma.rows[idx[c]]);
      A[r][k] = 1.0;
      rhs[r] = dot(ma.rows[idx[r]], v) + ma.offsets[idx[r]];
    }
    for (int c = 0; c < k; ++c) A[k][c] = 1.0;
    rhs[k] = 1.0;
    auto sol = linalg::solve(A, rhs);
    if (!sol) continue;
    bool ok = true;
    for (int r = 0; r < k && ok; ++r)
      if ((*sol)[r] < -1e-12) ok = false;
    if (!ok) continue;
    Vec z = v;
    for (int r = 0; r < k; ++r) axpy(-t * (*sol)[r], ma.rows[idx[r]], z);
    double s = (*sol)[k];
    double tolf = 1e-12 * (1.0 + std::fabs(s));
    for (int i = 0; i < m && ok; ++i)
      if (!(mask & (1u << i)) && dot(ma.rows[i], z) + ma.offsets[i] > s + tolf) ok = false;
    if (ok) return z;
  }
  throw InternalError("max-affine enumeration found no certificate");
}

Vec soft_threshold(const Vec& v, double t) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    r[i] = (v[i] > t) ? v[i] - t : ((v[i] < -t) ? v[i] + t : 0.0);
  return r;
}

// Largest ||x - y|| any point with objective <= h_ref can reach, from one
// subgradient cut at an anchor in the domain of f.
double coercive_radius(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                       double lam, bool pr, const Vec& x, double h_ref, double known_feasible) {
  Vec s = cf_domain_point(S, f);
  Vec g = cf_subgradient(S, f, s);
  double c2 = dual_norm(S, g);
  double c1 = h_ref - cf_eval(S, f, s) + c2 * norm(S, sub(x, s));
  auto feasible = [&](double D) { return reg_value(F, lam, pr, D) <= c1 + c2 * D; };
  double lo = std::max(1.0, known_feasible);
  if (!feasible(lo)) return lo;  // the feasible interval ends below lo already
  double hi = lo;
  int grow = 0;
  while (feasible(hi)) {
    hi *= 2.0;
    if (++grow > 200) throw InternalError("coercive radius bracket failed");
  }
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double sup_separation(const NormedSpace& S, const YoungFunction& F, double r0, double target) {
  auto below = [&](double d) {
    try {
      return compose_modulus(S, F, r0, d) <= target;
    } catch (const InputError&) {
      return true;  // underflowed modulus is certainly below a positive target
    }
  };
  double hi = 2.0 * r0;
  if (below(hi)) return hi;
  double lo = 0.0;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    if (below(mid))
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

void validate_lam(double lam) {
  if (!(lam > 0.0) || !(lam <= 1.0)) throw InputError("step parameter must lie in (0, 1]");
}

}  // namespace

double certified_gap_to_distance(const NormedSpace& S, const YoungFunction& F, double r0,
                                 double lam, double gap) {
  validate_lam(lam);
  if (!(r0 > 0.0)) throw InputError("certified_gap_to_distance requires r0 > 0");
  if (gap < 0.0 || std::isnan(gap)) throw InputError("gap must be nonnegative");
  if (gap == 0.0) return 0.0;
  double target = 0.5 * young_density(F, lam) * gap;
  if (!(target > 0.0)) return 2.0 * r0;
  return sup_separation(S, F, r0, target);
}

double certified_gap_to_distance_pr(const NormedSpace& S, const YoungFunction& F, double r0,
                                    double lam, double gap) {
  validate_lam(lam);
  if (!(r0 > 0.0)) throw InputError("certified_gap_to_distance requires r0 > 0");
  if (gap < 0.0 || std::isnan(gap)) throw InputError("gap must be nonnegative");
  if (gap == 0.0) return 0.0;
  double target = 0.5 * gap / lam;
  if (!(target > 0.0)) return 2.0 * r0;
  return lam * sup_separation(S, F, r0 / lam, target);
}

namespace {

// Contract an initial displacement bound into a self-consistent pair
// (radius, bound): the certificate ball only needs to hold the approximate
// and the true minimizer, so shrinking it sharpens the modulus.
void certify_distance(const NormedSpace& S, const YoungFunction& F, double lam, bool pr,
                      const Vec& x, ProxResult& res, double d0) {
  double dxy = norm(S, sub(x, res.minimizer));
  double d = d0;
  auto g2d = [&](double r0, double gap) {
    return pr ? certified_gap_to_distance_pr(S, F, r0, lam, gap)
              : certified_gap_to_distance(S, F, r0, lam, gap);
  };
  if (res.gap == 0.0 || d0 == 0.0) {
    res.radius = dxy;
    res.distance_bound = 0.0;
    return;
  }
  for (int k = 0; k < 8; ++k) d = std::min(d, g2d(dxy + d, res.gap));
  res.radius = dxy + d;
  res.distance_bound = std::min(d, g2d(res.radius, res.gap));
}

struct SmoothModel {
  const NormedSpace& S;
  const YoungFunction& F;
  double lam;
  bool pr;
  const Vec& x;
  const Quadratic* quad;

  double value(const Vec& y) const {
    double v = reg_value(F, lam, pr, norm(S, sub(x, y)));
    if (quad) v += 0.5 * dot(y, linalg::mat_vec(quad->Q, y)) + dot(quad->b, y);
    return v;
  }
  Vec gradient(const Vec& y) const {
    Vec g = reg_gradient(S, F, lam, pr, x, y);
    if (quad) {
      axpy(1.0, linalg::mat_vec(quad->Q, y), g);
      axpy(1.0, quad->b, g);
    }
    return g;
  }
};

enum class NKind { Zero, L1, MaxAff };

struct NonsmoothModel {
  NKind kind = NKind::Zero;
  double w = 0.0;
  const MaxAffine* ma = nullptr;

  double value(const Vec& y) const {
    switch (kind) {
      case NKind::Zero:
        return 0.0;
      case NKind::L1: {
        double s = 0.0;
        for (double v : y) s += std::fabs(v);
        return w * s;
      }
      case NKind::MaxAff: {
        double best = -kInf;
        for (std::size_t i = 0; i < ma->rows.size(); ++i)
          best = std::max(best, dot(ma->rows[i], y) + ma->offsets[i]);
        return best;
      }
    }
    return 0.0;
  }
  Vec prox(const Vec& v, double t) const {
    switch (kind) {
      case NKind::Zero:
        return v;
      case NKind::L1:
        return soft_threshold(v, w * t);
      case NKind::MaxAff:
        return maxaffine_prox(*ma, t, v);
    }
    return v;
  }
};

struct IterState {
  Vec ybest;
  double hbest = kInf;
  double lb = -kInf;
  int evals = 0;
};

void consider(IterState& st, const Vec& y, double h, double cut) {
  if (h < st.hbest) {
    st.hbest = h;
    st.ybest = y;
  }
  st.lb = std::max(st.lb, cut);
}

// Damped Newton on a smooth function given by value/gradient closures, with
// finite-difference Hessians. Descends from y in place; stops on stall.
template <class Value, class Grad>
void newton_descend(Vec& y, const Value& val, const Grad& grd, int iters, IterState& st,
                    const std::function<void(Vec&)>& clamp = {}) {
  const int n = int(y.size());
  for (int it = 0; it < iters; ++it) {
    Vec g = grd(y);
    st.evals += 1;
    linalg::Mat H(n, Vec(n, 0.0));
    for (int j = 0; j < n; ++j) {
      double h = 1e-6 * (1.0 + std::fabs(y[j]));
      Vec yp = y, ym = y;
      yp[j] += h;
      ym[j] -= h;
      Vec gp = grd(yp), gm = grd(ym);
      st.evals += 2;
      for (int i = 0; i < n; ++i) H[i][j] = (gp[i] - gm[i]) / (2.0 * h);
    }
    double tr = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double s = 0.5 * (H[i][j] + H[j][i]);
        H[i][j] = H[j][i] = s;
      }
      tr += std::fabs(H[i][i]);
    }
    for (int i = 0; i < n; ++i) H[i][i] += 1e-11 * (1.0 + tr / n);
    Vec step;
    auto sol = linalg::solve(H, scale(-1.0, g));
    if (sol && dot(*sol, g) < 0.0)
      step = *sol;
    else
      step = scale(-1.0 / (1.0 + std::sqrt(dot(g, g))), g);
    double f0 = val(y);
    double slope = dot(g, step);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      Vec cand = y;
      axpy(t, step, cand);
      if (clamp) clamp(cand);
      if (val(cand) <= f0 + 1e-4 * t * slope) {
        y = cand;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return;
  }
}

struct FistaOutcome {
  IterState st;
  double rho = 0.0;
};

FistaOutcome run_fista(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                       double lam, bool pr, const Vec& x, const ProxOptions& opt) {
  SmoothModel G{S, F, lam, pr, x, std::get_if<Quadratic>(&f)};
  NonsmoothModel N;
  if (const auto* l = std::get_if<L1Norm>(&f)) {
    N.kind = NKind::L1;
    N.w = l->weight;
  } else if (const auto* m = std::get_if<MaxAffine>(&f)) {
    N.kind = NKind::MaxAff;
    N.ma = m;
  }

  IterState st;
  st.ybest = x;
  st.hbest = G.value(x) + N.value(x);
  st.evals = 1;
  double rho = coercive_radius(S, f, F, lam, pr, x, st.hbest, 0.0);

  auto certify = [&](const Vec& y, const Vec& gh, double h) {
    double res = dual_norm(S, gh);
    consider(st, y, h, h - res * (norm(S, sub(x, y)) + rho));
  };
  auto done = [&]() { return st.hbest - st.lb <= opt.tol; };

  auto polish = [&]() {
    if (N.kind == NKind::MaxAff) return;
    if (N.kind == NKind::Zero) {
      Vec y = st.ybest;
      newton_descend(
          y, [&](const Vec& u) { return G.value(u); },
          [&](const Vec& u) { return G.gradient(u); }, 30, st);
      Vec g = G.gradient(y);
      st.evals += 1;
      certify(y, g, G.value(y));
      return;
    }
    // l1: Newton passes on the sign-fixed support, clamped to its orthant.
    Vec y = st.ybest;
    std::vector<int> prev;
    for (int pass = 0; pass < 5; ++pass) {
      std::vector<int> sup;
      Vec sgn;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (std::fabs(y[i]) > 1e-10) {
          sup.push_back(int(i));
          sgn.push_back(y[i] > 0.0 ? 1.0 : -1.0);
        }
      if (sup.empty() || sup == prev) break;
      prev = sup;
      Vec base = y;
      for (std::size_t i = 0; i < y.size(); ++i) base[i] = 0.0;
      auto lift = [&](const Vec& u) {
        Vec z = base;
        for (std::size_t r = 0; r < sup.size(); ++r) z[sup[r]] = u[r];
        return z;
      };
      Vec u(sup.size());
      for (std::size_t r = 0; r < sup.size(); ++r) u[r] = y[sup[r]];
      auto val = [&](const Vec& uu) {
        double s = 0.0;
        for (std::size_t r = 0; r < uu.size(); ++r) s += sgn[r] * uu[r];
        return G.value(lift(uu)) + N.w * s;
      };
      auto grd = [&](const Vec& uu) {
        Vec g = G.gradient(lift(uu));
        Vec gr(uu.size());
        for (std::size_t r = 0; r < uu.size(); ++r) gr[r] = g[sup[r]] + N.w * sgn[r];
        return gr;
      };
      std::function<void(Vec&)> clamp = [&](Vec& uu) {
        for (std::size_t r = 0; r < uu.size(); ++r)
          if (uu[r] * sgn[r] < 0.0) uu[r] = 0.0;
      };
      newton_descend(u, val, grd, 15, st, clamp);
      y = lift(u);
      Vec g = G.gradient(y);
      st.evals += 1;
      Vec gh(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::fabs(y[i]) > 1e-12)
          gh[i] = g[i] + N.w * (y[i] > 0.0 ? 1.0 : -1.0);
        else
          gh[i] = (g[i] > 0.0 ? 1.0 : -1.0) * std::max(std::fabs(g[i]) - N.w, 0.0);
      }
      certify(y, gh, G.value(y) + N.value(y));
      if (done()) return;
    }
  };

  double L = 1.0;
  Vec yk = x, v = x;
  double tk = 1.0;
  int outer = 0;
  while (!done() && st.evals < opt.budget) {
    Vec gv = G.gradient(v);
    double Gv = G.value(v);
    st.evals += 2;
    Vec cand;
    double Gc = 0.0;
    while (true) {
      Vec w = v;
      axpy(-1.0 / L, gv, w);
      cand = N.prox(w, 1.0 / L);
      Gc = G.value(cand);
      st.evals += 1;
      Vec d = sub(cand, v);
      double quad = Gv + dot(gv, d) + 0.5 * L * dot(d, d);
      if (Gc <= quad + 1e-12 * (1.0 + std::fabs(quad)) || L > 1e18) break;
      L *= 2.0;
    }
    Vec gh = scale(L, sub(v, cand));
    axpy(-1.0, gv, gh);
    Vec gc = G.gradient(cand);
    st.evals += 1;
    axpy(1.0, gc, gh);
    certify(cand, gh, Gc + N.value(cand));
    if (done()) break;

    double tk1 = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    Vec dk = sub(cand, yk);
    if (dot(sub(v, cand), dk) > 0.0) {
      tk1 = 1.0;  // momentum restart
      v = cand;
    } else {
      v = cand;
      axpy((tk - 1.0) / tk1, dk, v);
    }
    yk = cand;
    tk = tk1;
    L = std::max(L * 0.9, 1e-12);
    if (++outer % 40 == 0) polish();
  }
  if (!done()) polish();
  return {std::move(st), rho};
}

ProxResult prox_common(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                       double lam, bool pr, const Vec& x, const ProxOptions& opt) {
  validate_lam(lam);
  check_dim(S, x, "prox");
  validate_function(S, f);

  ProxResult res;
  if (std::holds_alternative<ZeroFn>(f)) {
    res.minimizer = x;
    res.closed_form = true;
    return res;
  }

  if (const auto* ind = std::get_if<IndicatorFn>(&f)) {
    auto pd = project_detail(S, ind->set, x, 1e-11, opt.budget);
    res.minimizer = pd.point;
    res.objective = reg_value(F, lam, pr, pd.distance);
    res.gap = std::max(0.0, res.objective - reg_value(F, lam, pr, std::max(pd.distance_lower, 0.0)));
    res.iterations = pd.iterations;
    res.closed_form = pd.exact;
    certify_distance(S, F, lam, pr, x, res, 2.0 * pd.distance);
    return res;
  }

  if (S.hilbert() && F.kind == YoungKind::Power && F.p == 2.0 && !opt.force_iterative) {
    // Both objectives reduce to f(y) + ||x - y||^2 / (2 lam).
    if (const auto* q = std::get_if<Quadratic>(&f)) {
      linalg::Mat A = q->Q;
      for (int i = 0; i < S.dim; ++i) {
        for (int j = 0; j < S.dim; ++j) A[i][j] *= lam;
        A[i][i] += 1.0;
      }
      Vec rhs = x;
      axpy(-lam, q->b, rhs);
      auto sol = linalg::solve(A, rhs);
      if (!sol) throw InputError("quadratic prox: I + lam*Q is singular; Q must be psd");
      res.minimizer = *sol;
    } else if (const auto* l = std::get_if<L1Norm>(&f)) {
      res.minimizer = soft_threshold(x, l->weight * lam);
    } else {
      res.minimizer = maxaffine_prox(std::get<MaxAffine>(f), lam, x);
    }
    res.objective = cf_eval(S, f, res.minimizer) +
                    reg_value(F, lam, pr, norm(S, sub(x, res.minimizer)));
    res.radius = norm(S, sub(x, res.minimizer));
    res.closed_form = true;
    return res;
  }

  auto out = run_fista(S, f, F, lam, pr, x, opt);
  double gap = std::max(out.st.hbest - out.st.lb, 0.0);
  if (gap > opt.tol)
    throw SolverError("proximal solve exhausted its budget", out.st.ybest, gap);
  res.minimizer = out.st.ybest;
  res.objective = out.st.hbest;
  res.gap = gap;
  res.iterations = out.st.evals;
  certify_distance(S, F, lam, pr, x, res,
                   norm(S, sub(x, res.minimizer)) + out.rho);
  return res;
}

}  // namespace

ProxResult prox_young(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                      double lam, const Vec& x, const ProxOptions& opt) {
  return prox_common(S, f, F, lam, false, x, opt);
}

ProxResult prox_pr(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                   double lam, const Vec& x, const ProxOptions& opt) {
  return prox_common(S, f, F, lam, true, x, opt);
}

double moreau_envelope(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                       double lam, const Vec& x, const ProxOptions& opt) {
  return prox_pr(S, f, F, lam, x, opt).objective;
}

SweepResult lambda_sweep(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                         const Vec& x, const std::vector<double>& lams, const ProxOptions& opt) {
  if (lams.empty()) throw InputError("lambda_sweep: empty grid");
  for (std::size_t k = 0; k < lams.size(); ++k) {
    if (!(lams[k] > 0.0) || !(lams[k] <= 1.0))
      throw InputError("lambda_sweep: steps must lie in (0, 1]");
    if (k > 0 && !(lams[k] < lams[k - 1]))
      throw InputError("lambda_sweep: grid must be strictly decreasing");
  }
  SweepResult out;
  out.entries.reserve(lams.size());
  for (double lam : lams) {
    auto r = prox_young(S, f, F, lam, x, opt);
    SweepEntry e;
    e.lam = lam;
    e.value = cf_eval(S, f, r.minimizer);
    e.distance = norm(S, sub(x, r.minimizer));
    e.distance_bound = r.distance_bound;
    e.gap = r.gap;
    e.minimizer = std::move(r.minimizer);
    out.entries.push_back(std::move(e));
  }
  for (std::size_t k = 0; k + 1 < out.entries.size(); ++k) {
    const auto& a = out.entries[k];
    const auto& b = out.entries[k + 1];
    double slack = 2.0 * (a.distance_bound + b.distance_bound + a.gap + b.gap) +
                   1e-12 * (1.0 + std::fabs(a.value) + std::fabs(b.value));
    if (b.distance > a.distance + slack) out.distances_monotone = false;
    if (b.value < a.value - slack) out.values_monotone = false;
  }
  return out;
}

}  // namespace proxuc
