#ifndef PROXUC_MODULI_HPP
#define PROXUC_MODULI_HPP

#include <functional>
#include <map>
#include <string>

#include "proxuc/spaces.hpp"
#include "proxuc/young.hpp"

namespace proxuc {

// A quantitative convexity guarantee: eval(eps) lower-bounds some midpoint
// gap for separations >= eps. eps_lo/eps_hi bracket the range the
// construction certifies; params carries the constants that built it.
struct Modulus {
  std::function<double(double)> eval;
  std::string provenance;
  double eps_lo = 0.0;
  double eps_hi = 2.0;
  std::map<std::string, double> params;
  double operator()(double eps) const { return eval(eps); }
};

Modulus space_modulus(const NormedSpace& S);

// Conversions between the midpoint-gap form and the duality-monotonicity
// form. They are one-sided estimates, not inverses: a round trip loses a
// factor of 2.
double gamma_from_delta(double delta);
double delta_from_gamma(double gamma);

// Convexity modulus of y -> Phi(||y||) on the ball of radius r. Separations
// beyond 2r evaluate at 2r. Throws InputError when an intermediate quantity
// underflows double precision (extreme r for the transcendental kernels).
double compose_modulus(const NormedSpace& S, const YoungFunction& F, double r, double eps);
Modulus make_compose_modulus(const NormedSpace& S, const YoungFunction& F, double r);

// Power-kernel shortcut min{B/2^p, A*K/8^p} * eps^p on (0, 2], from a space
// with delta_X >= A*eps^p, a scalar modulus >= B*eps^p, and a density lower
// bound phi(t) >= K*t^(p-1). Requires A in (0, 1/2).
Modulus power_compose_modulus(double A, double B, double K, double p);

// Same shape without the kernel data: eps -> (A/8^p) * eps^p, valid for all
// eps > 0.
Modulus power_norm_modulus(double A, double p);

// A convex integrand given by value, right derivative, and a global scalar
// convexity modulus.
struct PsiFunction {
  std::function<double(double)> eval;
  std::function<double(double)> right_derivative;
  std::function<double(double)> delta;
  std::string name;
};

PsiFunction power_psi(double p);  // t^p/p, p >= 2
PsiFunction exp_psi();            // e^t - t - 1
PsiFunction cosh_psi();           // cosh(t) - 1

// Per-epsilon witness for the far-field behaviour of Psi(||.||): for every
// t > max(K_eps(e), e/2) the product right_derivative(t) * delta_X(e/t) * t
// must stay at or above xi_eps(e).
struct WitnessPair {
  std::function<double(double)> K_eps;
  std::function<double(double)> xi_eps;
};

// Witness for the stock kernels on lp^n, built from the power-type constant
// of the space with a factor-2 safety margin. The power kernel needs its
// exponent to dominate the space exponent.
WitnessPair stock_witness(const NormedSpace& S, const YoungFunction& Psi);

// Samples the witness inequality on a geometric grid of t; false on the
// first violation.
bool witness_valid(const NormedSpace& S, const PsiFunction& Psi, const WitnessPair& W,
                   double eps);

// Convexity modulus of y -> Psi(||y||) on the whole space, assembled from
// the scalar modulus of Psi near the midpoint and the witness far out.
Modulus psi_compose_modulus(const NormedSpace& S, const PsiFunction& Psi, const WitnessPair& W);

// Radius within which every proximal minimizer stays when the base point
// moves in B(0, r) and the reference minimizer sits within R0 of its base
// point. Increasing in both arguments, so upper estimates of R0 are safe.
double prox_radius_bound(const YoungFunction& F, double r, double R0);

// Uniform-continuity modulus of the proximal map over B(0, R), independent
// of the step parameter.
Modulus prox_uc_modulus(const NormedSpace& S, const YoungFunction& F, double R);

// Step-dependent variant; lam = 1 reproduces prox_uc_modulus exactly. For
// power kernels the step cancels and the value is lam-free; the
// transcendental kernels genuinely depend on the step, tightening toward
// zero as lam shrinks (extreme lam can underflow, raising InputError).
Modulus prox_uc_modulus_alt(const NormedSpace& S, const YoungFunction& F, double R, double lam);

// Step threshold below which the proximal point stays eps-close to the
// metric projection onto the domain of the objective. beta upper-bounds the
// distance from the base point to a reference proximal point, zeta strictly
// dominates the value gap to a nearby feasible point; larger estimates of
// either only shrink the threshold.
double lambda_threshold(const YoungFunction& F, const Modulus& space_mod, double eps,
                        double beta, double zeta);

// Hoelder constant L for the proximal map of a power kernel on a space with
// delta_X >= A*eps^p: displacements obey max{2||x-y||, L*||x-y||^(1/p)}
// inside B(0, r). Requires r >= 1.
double hoelder_constant(double A, double p, double r);

// Companion modulus eps -> min{eps/2, (2A/(16^p R^(p-1))) * eps^p}.
Modulus hoelder_modulus(double A, double p, double R);

// Radial bisection output: member(x/upper) holds, member(x/lower) fails, so
// the Minkowski gauge of x lies in (lower, upper].
struct GaugeBracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Equivalent norm |||.||| built from a nonnegative convex f vanishing at 0:
// the gauge of B = {x in B_X : f(x) <= level}, with (1/alpha)||x|| <=
// |||x||| <= (1/beta)||x|| and a convexity modulus for the new norm.
struct RenormResult {
  double alpha = 0.0;
  double beta = 0.0;
  double level = 0.0;
  bool symmetrized = false;  // f lacked even symmetry and was averaged
  std::function<bool(const Vec&)> member;
  std::function<GaugeBracket(const Vec&)> gauge;
  Modulus modulus;
};

// f_modulus: convexity modulus of f on the unit ball. omega_f0: localization
// rate, f(x) <= t forces ||x|| <= omega_f0(t). Requires omega_f0(M) < 1.
RenormResult renorm(const NormedSpace& S, const std::function<double(const Vec&)>& f,
                    const std::function<double(double)>& f_modulus,
                    const std::function<double(double)>& omega_f0, double M);

}  // namespace proxuc

#endif
