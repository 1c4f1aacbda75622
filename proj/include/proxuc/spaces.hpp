#ifndef PROXUC_SPACES_HPP
#define PROXUC_SPACES_HPP

#include <functional>
#include <variant>
#include <vector>

#include "proxuc/errors.hpp"
#include "proxuc/vec.hpp"

namespace proxuc {

inline constexpr int kDefaultMaxDim = 16;

// lp^n with p >= 2; p = 2 is the Hilbert case. Dimensions are small and
// everything is dense.
struct NormedSpace {
  int dim = 0;
  double p = 2.0;
  bool hilbert() const { return p == 2.0; }
  double dual_exponent() const { return p / (p - 1.0); }
};

NormedSpace make_lp_space(int dim, double p, int max_dim = kDefaultMaxDim);

double norm(const NormedSpace& S, const Vec& x);
// lp' norm of a coefficient vector, p' the conjugate exponent.
double dual_norm(const NormedSpace& S, const Vec& u);

// Modulus of uniform convexity: 1 - ||(x+y)/2|| >= delta_X(eps) for unit-ball
// x, y with ||x-y|| >= eps. Values are capped at 1/2 and eps beyond 2
// evaluates at 2.
double delta_X(const NormedSpace& S, double eps);

// Monotone-bisection inverse of the *uncapped* formula (p = 2: eps^2/8 on
// [0, inf); p > 2: the Clarkson expression on [0, 2]). The continuity bound
// below needs targets past the 1/2 cap, so the cap stays out of the inverse.
double delta_X_inverse(const NormedSpace& S, double t);

// Largest simple coefficient A with A*eps^p <= delta_X(eps) on (0, 2]:
// 1/8 for p = 2 and 1/(p*2^p) for p > 2. Always < 1/2.
double power_type_constant(const NormedSpace& S);

// The unique element x* of the duality set J at x: ||x*||_{p'} = phi_value and
// <x*, x> = ||x|| * phi_value. Both identities are self-checked to 1e-10.
Vec duality_element(const NormedSpace& S, double phi_value, const Vec& x);

struct Ball {
  Vec center;
  double radius = 1.0;  // ambient-norm ball
};
struct Box {
  Vec lower;
  Vec upper;
};
struct Halfspace {
  Vec normal;        // <normal, y> <= offset
  double offset = 0.0;
};
struct AffineSubspace {
  Vec point;
  std::vector<Vec> basis;  // linearly independent directions; may be empty
};
using ConvexSet = std::variant<Ball, Box, Halfspace, AffineSubspace>;

std::string set_name(const ConvexSet& C);
bool set_contains(const NormedSpace& S, const ConvexSet& C, const Vec& y, double tol = 1e-12);

struct ProjectResult {
  Vec point;                   // member of the set
  double distance = 0.0;       // ||x - point||
  double distance_lower = 0.0; // certified lower bound on the true distance
  bool exact = false;          // closed form: distance == distance_lower
  int iterations = 0;
};

// Nearest point in C under the space norm. Ball, box, and halfspace have
// closed forms for every p; affine subspaces are closed-form for p = 2 and
// solved by a damped Newton iteration with a dual distance certificate
// otherwise.
ProjectResult project_detail(const NormedSpace& S, const ConvexSet& C, const Vec& x,
                             double tol = 1e-10, int budget = 20000);
Vec project(const NormedSpace& S, const ConvexSet& C, const Vec& x);

// (R+r) * delta_X_inverse(2r/(R+r)): how far the projection onto a convex
// subset of B(c, r) can move when its argument moves within B(c, R).
double projection_continuity_bound(double R, double r,
                                   const std::function<double(double)>& delta_X_inv);
double projection_continuity_bound(const NormedSpace& S, double R, double r);

}  // namespace proxuc

#endif
