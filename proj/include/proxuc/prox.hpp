#ifndef PROXUC_PROX_HPP
#define PROXUC_PROX_HPP

#include <string>
#include <variant>
#include <vector>

#include "proxuc/linalg.hpp"
#include "proxuc/moduli.hpp"
#include "proxuc/spaces.hpp"
#include "proxuc/young.hpp"

namespace proxuc {

// Objectives the proximal solver accepts. All are convex; Quadratic must be
// symmetric positive semidefinite (symmetry is validated, definiteness is
// the caller's contract).
struct ZeroFn {};
struct Quadratic {
  linalg::Mat Q;  // dense symmetric, dim x dim
  Vec b;
};
struct IndicatorFn {
  ConvexSet set;
};
struct L1Norm {
  double weight = 1.0;
};
struct MaxAffine {
  std::vector<Vec> rows;  // value max_i <rows[i], y> + offsets[i]; at most 16 rows
  Vec offsets;
};
using ConvexFunction = std::variant<ZeroFn, Quadratic, IndicatorFn, L1Norm, MaxAffine>;

std::string cf_name(const ConvexFunction& f);
// +infinity outside an indicator's set.
double cf_eval(const NormedSpace& S, const ConvexFunction& f, const Vec& y);
// One Euclidean subgradient at y; for indicators y must be feasible (0 is
// returned).
Vec cf_subgradient(const NormedSpace& S, const ConvexFunction& f, const Vec& y);
// Some point where f is finite.
Vec cf_domain_point(const NormedSpace& S, const ConvexFunction& f);

struct ProxResult {
  Vec minimizer;
  double objective = 0.0;       // full objective value at minimizer
  double gap = 0.0;             // certified optimality gap
  double distance_bound = 0.0;  // certified ||minimizer - true minimizer||
  double radius = 0.0;          // ball around x backing the distance certificate
  int iterations = 0;
  bool closed_form = false;
};

struct ProxOptions {
  double tol = 1e-8;  // optimality-gap target for iterative solves
  int budget = 200000;
  // Skip the Hilbert/quadratic closed forms and solve iteratively anyway;
  // exact dispatches (zero objective, indicators) are unaffected.
  bool force_iterative = false;
};

// argmin_y f(y) + Phi(||x - y||) / phi(lam), lam in (0, 1].
ProxResult prox_young(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                      double lam, const Vec& x, const ProxOptions& opt = {});

// argmin_y f(y) + lam * Phi(||x - y|| / lam), lam in (0, 1]. Coincides with
// prox_young for power kernels (the step scaling cancels).
ProxResult prox_pr(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                   double lam, const Vec& x, const ProxOptions& opt = {});

// Value of the prox_pr objective at its minimizer.
double moreau_envelope(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                       double lam, const Vec& x, const ProxOptions& opt = {});

// Largest displacement compatible with an objective gap: sup{d <= 2*r0 :
// delta(d) <= phi(lam)*gap/2} for the composed modulus at radius r0,
// reported from the safe (upper) end of the bisection. Any r0 whose ball
// around x contains both points makes the bound valid.
double certified_gap_to_distance(const NormedSpace& S, const YoungFunction& F, double r0,
                                 double lam, double gap);
// Same certificate for the prox_pr objective: d = lam * sup{s <= 2*r0/lam :
// delta_{r0/lam}(s) <= gap/(2*lam)}.
double certified_gap_to_distance_pr(const NormedSpace& S, const YoungFunction& F, double r0,
                                    double lam, double gap);

struct SweepEntry {
  double lam = 0.0;
  Vec minimizer;
  double value = 0.0;     // f at the minimizer
  double distance = 0.0;  // ||x - minimizer||
  double distance_bound = 0.0;
  double gap = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  // Monotonicity up to twice the certified perturbations: displacement grows
  // and the f-value falls as the step grows.
  bool distances_monotone = true;
  bool values_monotone = true;
};

// prox_young along a strictly decreasing grid of steps in (0, 1].
SweepResult lambda_sweep(const NormedSpace& S, const ConvexFunction& f, const YoungFunction& F,
                         const Vec& x, const std::vector<double>& lams,
                         const ProxOptions& opt = {});

}  // namespace proxuc

#endif
