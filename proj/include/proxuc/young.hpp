#ifndef PROXUC_YOUNG_HPP
#define PROXUC_YOUNG_HPP

#include <string>

#include "proxuc/errors.hpp"

namespace proxuc {

// Regularizer kernels: strictly convex Phi with Phi(0)=0, Phi(t) = int_0^t phi,
// phi strictly increasing with phi(0)=0, Phi(t)/t -> 0 at 0 and -> inf at inf.
enum class YoungKind { Power, Exp, Cosh };

struct YoungFunction {
  YoungKind kind = YoungKind::Power;
  double p = 2.0;  // Power only: Phi(t) = t^p / p, phi(t) = t^(p-1)
};

YoungFunction power_young(double p);  // requires p >= 2
YoungFunction exp_young();            // Phi(t) = e^t - t - 1, phi(t) = e^t - 1
YoungFunction cosh_young();           // Phi(t) = cosh(t) - 1, phi(t) = sinh(t)

std::string young_name(const YoungFunction& F);

// Phi(t). Exp/cosh use series / stable identities near zero so tiny arguments
// keep full relative precision (the raw e^t - t - 1 cancels catastrophically).
double young_eval(const YoungFunction& F, double t);

// phi(t) = Phi'(t).
double young_density(const YoungFunction& F, double t);

// Witness of Phi(t)/t -> 0: returns s > 0 with Phi(s)/s <= t; the returned s
// also satisfies phi(s/2) <= 2t.
double young_eta(const YoungFunction& F, double t);

// Witness of Phi(t)/t -> inf: returns s > 0 with Phi(s)/s >= t.
double young_rho(const YoungFunction& F, double t);

// Monotonicity gap: Phi(b) - Phi(a) >= young_xi(F, r, eps) whenever
// b - a >= eps with a, b >= 0. The bound Phi(eps) is r-free; r is kept for
// interface symmetry with the other [0, r] witnesses.
double young_xi(const YoungFunction& F, double r, double eps);

// Continuity witness on [0, r]: |Phi(a) - Phi(b)| <= s whenever a, b lie in
// [0, r] and |a - b| <= young_omega(F, r, s).
double young_omega(const YoungFunction& F, double r, double s);

// Certified lower bound on the scalar midpoint convexity gap
//   inf { Phi(a)/2 + Phi(b)/2 - Phi((a+b)/2) : a, b in [0, r], |a - b| >= eps }.
// Power kernels use a closed-form global bound; exp/cosh evaluate the gap at
// the left endpoint (where their convex densities make it smallest) and keep
// a 1/2 safety factor.
double delta_scalar(const YoungFunction& F, double r, double eps);

}  // namespace proxuc

#endif
