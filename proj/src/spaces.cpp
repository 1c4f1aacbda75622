#include "proxuc/spaces.hpp"

#include <algorithm>
#include <cmath>

#include "proxuc/linalg.hpp"

namespace proxuc {

namespace {

void check_dim(const NormedSpace& S, const Vec& v, const char* what) {
  if (int(v.size()) != S.dim)
    throw InputError(std::string(what) + ": dimension mismatch");
}

double signum(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Sum |v_i|^p with cheap paths for the common exponents.
double power_sum(const Vec& v, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (double a : v) s += a * a;
  } else if (p == 4.0) {
    for (double a : v) {
      double t = a * a;
      s += t * t;
    }
  } else {
    for (double a : v) s += std::pow(std::fabs(a), p);
  }
  return s;
}

double clarkson_raw(double p, double e) {
  // stable form of 1 - (1 - (e/2)^p)^(1/p); the naive difference loses all
  // precision once (e/2)^p drops below machine epsilon
  return -std::expm1(std::log1p(-std::pow(0.5 * e, p)) / p);
}

// Euclidean least squares onto span(basis): solve (V^T V) w = V^T rhs.
std::optional<Vec> gram_solve(const std::vector<Vec>& basis, const Vec& rhs) {
  std::size_t k = basis.size();
  linalg::Mat G(k, Vec(k));
  Vec c(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) G[i][j] = dot(basis[i], basis[j]);
    c[i] = dot(basis[i], rhs);
  }
  return linalg::solve(std::move(G), std::move(c));
}

Vec span_combination(const std::vector<Vec>& basis, const Vec& w, std::size_t dim) {
  Vec r(dim, 0.0);
  for (std::size_t j = 0; j < basis.size(); ++j) axpy(w[j], basis[j], r);
  return r;
}

}  // namespace

NormedSpace make_lp_space(int dim, double p, int max_dim) {
  if (dim < 1 || dim > max_dim)
    throw InputError("space dimension must lie in [1, " + std::to_string(max_dim) + "]");
  if (!(p >= 2.0) || std::isinf(p))
    throw InputError("space exponent must satisfy 2 <= p < inf");
  return NormedSpace{dim, p};
}

double norm(const NormedSpace& S, const Vec& x) {
  check_dim(S, x, "norm");
  double s = power_sum(x, S.p);
  if (S.p == 2.0) return std::sqrt(s);
  if (S.p == 4.0) return std::sqrt(std::sqrt(s));
  return std::pow(s, 1.0 / S.p);
}

double dual_norm(const NormedSpace& S, const Vec& u) {
  check_dim(S, u, "dual_norm");
  if (S.p == 2.0) return std::sqrt(power_sum(u, 2.0));
  double q = S.dual_exponent();
  return std::pow(power_sum(u, q), 1.0 / q);
}

double delta_X(const NormedSpace& S, double eps) {
  if (!(eps > 0.0)) throw InputError("delta_X requires eps > 0");
  double e = std::min(eps, 2.0);
  if (S.p == 2.0) return std::min(e * e / 8.0, 0.5);
  return std::min(clarkson_raw(S.p, e), 0.5);
}

double delta_X_inverse(const NormedSpace& S, double t) {
  if (!(t > 0.0)) throw InputError("delta_X_inverse requires t > 0");
  double lo = 0.0, hi;
  if (S.p == 2.0) {
    hi = 4.0;
    while (hi * hi / 8.0 < t) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (mid * mid / 8.0 >= t)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }
  if (t >= 1.0) return 2.0;  // Clarkson range is [0, 1] on [0, 2]
  hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (clarkson_raw(S.p, mid) >= t)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double power_type_constant(const NormedSpace& S) {
  if (S.p == 2.0) return 0.125;
  return 1.0 / (S.p * std::pow(2.0, S.p));
}

Vec duality_element(const NormedSpace& S, double phi_value, const Vec& x) {
  check_dim(S, x, "duality_element");
  if (phi_value < 0.0) throw InputError("duality_element requires phi_value >= 0");
  double n = norm(S, x);
  if (n == 0.0) throw InputError("duality_element undefined at x = 0");
  Vec r(x.size());
  if (S.p == 2.0) {
    double c = phi_value / n;
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = c * x[i];
  } else {
    double c = phi_value / std::pow(n, S.p - 1.0);
    for (std::size_t i = 0; i < x.size(); ++i)
      r[i] = c * signum(x[i]) * std::pow(std::fabs(x[i]), S.p - 1.0);
  }
  double rel = 1.0 + phi_value;
  if (std::fabs(dual_norm(S, r) - phi_value) > 1e-10 * rel ||
      std::fabs(dot(r, x) - n * phi_value) > 1e-10 * rel * (1.0 + n))
    throw InternalError("duality_element identity check failed");
  return r;
}

std::string set_name(const ConvexSet& C) {
  if (std::holds_alternative<Ball>(C)) return "ball";
  if (std::holds_alternative<Box>(C)) return "box";
  if (std::holds_alternative<Halfspace>(C)) return "halfspace";
  return "affine";
}

bool set_contains(const NormedSpace& S, const ConvexSet& C, const Vec& y, double tol) {
  check_dim(S, y, "set_contains");
  if (const auto* b = std::get_if<Ball>(&C))
    return norm(S, sub(y, b->center)) <= b->radius + tol;
  if (const auto* b = std::get_if<Box>(&C)) {
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] < b->lower[i] - tol || y[i] > b->upper[i] + tol) return false;
    return true;
  }
  if (const auto* h = std::get_if<Halfspace>(&C))
    return dot(h->normal, y) <= h->offset + tol * (1.0 + std::fabs(h->offset));
  const auto& a = std::get<AffineSubspace>(C);
  Vec d = sub(y, a.point);
  if (!a.basis.empty()) {
    auto w = gram_solve(a.basis, d);
    if (!w) throw InputError("affine basis must be linearly independent");
    Vec proj = span_combination(a.basis, *w, y.size());
    d = sub(d, proj);
  }
  return std::sqrt(dot(d, d)) <= tol * (1.0 + std::sqrt(dot(y, y)));
}

namespace {

ProjectResult project_affine_lp(const NormedSpace& S, const AffineSubspace& A, const Vec& x,
                                double tol, int budget) {
  const double p = S.p;
  const std::size_t k = A.basis.size();
  Vec d = sub(x, A.point);
  auto w0 = gram_solve(A.basis, d);
  if (!w0) throw InputError("affine basis must be linearly independent");
  Vec w = *w0;  // Euclidean projection coefficients seed the iteration

  auto residual = [&](const Vec& coef) { return sub(d, span_combination(A.basis, coef, x.size())); };
  auto psi = [&](const Vec& coef) { return power_sum(residual(coef), p); };

  double best_lb = 0.0;
  Vec z = residual(w);
  double dist = norm(S, z);
  int it = 0;
  for (; it < budget; ++it) {
    // Dual certificate: the norming functional of z, projected onto the
    // orthogonal complement of the span, lower-bounds every feasible distance.
    Vec u(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
      u[i] = signum(z[i]) * std::pow(std::fabs(z[i]), p - 1.0);
    Vec ubar = u;
    for (int pass = 0; pass < 2 && k > 0; ++pass) {
      auto cw = gram_solve(A.basis, ubar);
      if (!cw) break;
      Vec proj = span_combination(A.basis, *cw, x.size());
      ubar = sub(ubar, proj);
    }
    double un = dual_norm(S, ubar);
    if (un > 1e-300) best_lb = std::max(best_lb, dot(ubar, d) / un);
    if (dist - best_lb <= tol) break;

    // Damped Newton step on sum |z_i|^p over the span coefficients.
    Vec grad(k, 0.0);
    linalg::Mat H(k, Vec(k, 0.0));
    for (std::size_t i = 0; i < z.size(); ++i) {
      double az = std::fabs(z[i]);
      double g = p * signum(z[i]) * std::pow(az, p - 1.0);
      double h = p * (p - 1.0) * (az > 0.0 ? std::pow(az, p - 2.0) : 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        grad[j] -= g * A.basis[j][i];
        for (std::size_t l = 0; l < k; ++l) H[j][l] += h * A.basis[j][i] * A.basis[l][i];
      }
    }
    double ridge = 1e-12 * (1.0 + std::fabs(psi(w)));
    for (std::size_t j = 0; j < k; ++j) H[j][j] += ridge;
    Vec step(k, 0.0);
    auto sol = linalg::solve(H, scale(-1.0, grad));
    if (sol)
      step = *sol;
    else
      step = scale(-1.0 / (1.0 + dot(grad, grad)), grad);
    double f0 = psi(w);
    double t = 1.0;
    Vec cand = w;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      cand = w;
      axpy(t, step, cand);
      if (psi(cand) < f0) {
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      // Stationary to float precision; the certificate loop above decides.
      if (dist - best_lb <= std::max(tol, 1e-12 * (1.0 + dist))) break;
      throw SolverError("affine projection stalled", residual(w), dist - best_lb);
    }
    w = cand;
    z = residual(w);
    dist = norm(S, z);
  }
  if (dist - best_lb > std::max(tol, 1e-12 * (1.0 + dist)))
    throw SolverError("affine projection budget exhausted", sub(x, z), dist - best_lb);
  Vec y = sub(x, z);
  return ProjectResult{y, dist, std::min(best_lb, dist), false, it};
}

}  // namespace

ProjectResult project_detail(const NormedSpace& S, const ConvexSet& C, const Vec& x,
                             double tol, int budget) {
  check_dim(S, x, "project");
  if (const auto* b = std::get_if<Ball>(&C)) {
    check_dim(S, b->center, "project(ball)");
    if (!(b->radius > 0.0)) throw InputError("ball radius must be positive");
    Vec d = sub(x, b->center);
    double n = norm(S, d);
    if (n <= b->radius) return ProjectResult{x, 0.0, 0.0, true, 0};
    // Radial point attains the triangle-inequality lower bound n - radius.
    Vec y = b->center;
    axpy(b->radius / n, d, y);
    double dist = n - b->radius;
    return ProjectResult{y, dist, dist, true, 0};
  }
  if (const auto* b = std::get_if<Box>(&C)) {
    check_dim(S, b->lower, "project(box)");
    check_dim(S, b->upper, "project(box)");
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (b->lower[i] > b->upper[i]) throw InputError("box has lower > upper");
      y[i] = std::clamp(x[i], b->lower[i], b->upper[i]);
    }
    double dist = norm(S, sub(x, y));  // separable objective: clamp is optimal
    return ProjectResult{y, dist, dist, true, 0};
  }
  if (const auto* h = std::get_if<Halfspace>(&C)) {
    check_dim(S, h->normal, "project(halfspace)");
    double an = dual_norm(S, h->normal);
    if (an == 0.0) throw InputError("halfspace normal must be nonzero");
    double v = dot(h->normal, x) - h->offset;
    if (v <= 0.0) return ProjectResult{x, 0.0, 0.0, true, 0};
    // Step along the dual-norming direction reaches the hyperplane at
    // distance v / ||normal||_{p'}, which matches the Hoelder lower bound.
    double q = S.dual_exponent();
    double denom = power_sum(h->normal, q);
    Vec y = x;
    for (std::size_t i = 0; i < x.size(); ++i)
      y[i] -= v * signum(h->normal[i]) * std::pow(std::fabs(h->normal[i]), q - 1.0) / denom;
    double dist = v / an;
    return ProjectResult{y, dist, dist, true, 0};
  }
  const auto& a = std::get<AffineSubspace>(C);
  check_dim(S, a.point, "project(affine)");
  for (const auto& b : a.basis) check_dim(S, b, "project(affine basis)");
  if (a.basis.empty()) {
    double dist = norm(S, sub(x, a.point));
    return ProjectResult{a.point, dist, dist, true, 0};
  }
  if (S.hilbert()) {
    Vec d = sub(x, a.point);
    auto w = gram_solve(a.basis, d);
    if (!w) throw InputError("affine basis must be linearly independent");
    Vec y = a.point;
    axpy(1.0, span_combination(a.basis, *w, x.size()), y);
    double dist = norm(S, sub(x, y));
    return ProjectResult{y, dist, dist, true, 0};
  }
  return project_affine_lp(S, a, x, tol, budget);
}

Vec project(const NormedSpace& S, const ConvexSet& C, const Vec& x) {
  return project_detail(S, C, x).point;
}

double projection_continuity_bound(double R, double r,
                                   const std::function<double(double)>& delta_X_inv) {
  if (!(r > 0.0) || !(r < R)) throw InputError("projection_continuity_bound requires 0 < r < R");
  return (R + r) * delta_X_inv(2.0 * r / (R + r));
}

double projection_continuity_bound(const NormedSpace& S, double R, double r) {
  return projection_continuity_bound(R, r, [&S](double t) { return delta_X_inverse(S, t); });
}

}  // namespace proxuc
