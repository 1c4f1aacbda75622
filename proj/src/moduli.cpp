#include "proxuc/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace proxuc {

namespace {

const char* kUnderflowMsg = "modulus evaluation underflows double precision";

void require_eps(double eps) {
  if (!(eps > 0.0)) throw InputError("modulus arguments must be positive");
}

void require_power_inputs(double A, double p) {
  if (!(A > 0.0) || !(A < 0.5)) throw InputError("power-type constant must lie in (0, 1/2)");
  if (!(p >= 2.0)) throw InputError("exponent must satisfy p >= 2");
}

double factorial(int m) {
  double f = 1.0;
  for (int k = 2; k <= m; ++k) f *= k;
  return f;
}

}  // namespace

Modulus space_modulus(const NormedSpace& S) {
  Modulus m;
  m.eval = [S](double eps) { return delta_X(S, eps); };
  m.provenance = "space";
  m.params = {{"p", S.p}};
  return m;
}

double gamma_from_delta(double delta) {
  if (delta < 0.0) throw InputError("gamma_from_delta requires delta >= 0");
  return 2.0 * delta;
}

double delta_from_gamma(double gamma) {
  if (gamma < 0.0) throw InputError("delta_from_gamma requires gamma >= 0");
  return 0.25 * gamma;
}

double compose_modulus(const NormedSpace& S, const YoungFunction& F, double r, double eps) {
  if (!(r > 0.0)) throw InputError("compose_modulus requires r > 0");
  require_eps(eps);
  double e = std::min(eps, 2.0 * r);
  double s = 0.25 * e * delta_X(S, e / (2.0 * r));
  if (!(s > 0.0)) throw InputError(kUnderflowMsg);
  double breve = young_xi(F, r, s) / 3.0;
  if (!(breve > 0.0)) throw InputError(kUnderflowMsg);
  double tilde = std::min(0.5 * e, young_omega(F, 1.5 * r, 2.0 * breve));
  if (!(tilde > 0.0)) throw InputError(kUnderflowMsg);
  double d = std::min(delta_scalar(F, r, tilde), breve);
  if (!(d > 0.0)) throw InputError(kUnderflowMsg);
  return d;
}

Modulus make_compose_modulus(const NormedSpace& S, const YoungFunction& F, double r) {
  if (!(r > 0.0)) throw InputError("compose_modulus requires r > 0");
  Modulus m;
  m.eval = [S, F, r](double eps) { return compose_modulus(S, F, r, eps); };
  m.provenance = "compose";
  m.eps_hi = 2.0 * r;
  m.params = {{"p", S.p}, {"r", r}};
  return m;
}

Modulus power_compose_modulus(double A, double B, double K, double p) {
  require_power_inputs(A, p);
  if (!(B > 0.0) || !(K > 0.0)) throw InputError("power_compose_modulus requires B, K > 0");
  double c = std::min(B / std::pow(2.0, p), A * K / std::pow(8.0, p));
  Modulus m;
  m.eval = [c, p](double eps) {
    require_eps(eps);
    return c * std::pow(std::min(eps, 2.0), p);
  };
  m.provenance = "power_compose";
  m.params = {{"A", A}, {"B", B}, {"K", K}, {"p", p}};
  return m;
}

Modulus power_norm_modulus(double A, double p) {
  require_power_inputs(A, p);
  double c = A / std::pow(8.0, p);
  Modulus m;
  m.eval = [c, p](double eps) {
    require_eps(eps);
    return c * std::pow(eps, p);
  };
  m.provenance = "power_norm";
  m.eps_hi = std::numeric_limits<double>::infinity();
  m.params = {{"A", A}, {"p", p}};
  return m;
}

namespace {

PsiFunction psi_from_kernel(const YoungFunction& F, std::function<double(double)> delta) {
  PsiFunction psi;
  psi.eval = [F](double t) { return young_eval(F, t); };
  psi.right_derivative = [F](double t) { return young_density(F, t); };
  psi.delta = std::move(delta);
  psi.name = young_name(F);
  return psi;
}

}  // namespace

PsiFunction power_psi(double p) {
  YoungFunction F = power_young(p);
  double expo = (p * p - 2.0 * p) / (p - 1.0);
  double denom = p * p * std::pow(2.0, expo);
  return psi_from_kernel(F, [p, denom](double eps) {
    require_eps(eps);
    return std::pow(eps, p) / denom;
  });
}

PsiFunction exp_psi() {
  // second derivative e^t >= 1, hence 1-strong convexity everywhere
  return psi_from_kernel(exp_young(), [](double eps) {
    require_eps(eps);
    return eps * eps / 8.0;
  });
}

PsiFunction cosh_psi() {
  return psi_from_kernel(cosh_young(), [](double eps) {
    require_eps(eps);
    return eps * eps / 8.0;
  });
}

WitnessPair stock_witness(const NormedSpace& S, const YoungFunction& Psi) {
  const double q = S.p;
  const double A = power_type_constant(S);
  // Exponent m with right_derivative(t) >= t^m / m! and m + 1 >= q; then
  // t > eps/2 gives derivative * delta_X(eps/t) * t >= A eps^q (eps/2)^(m+1-q)/m!
  // and the leading 1/2 leaves headroom.
  double m, mfact;
  switch (Psi.kind) {
    case YoungKind::Power:
      if (Psi.p < q)
        throw InputError("stock witness needs the kernel exponent to dominate the space exponent");
      m = Psi.p - 1.0;
      mfact = 1.0;
      break;
    case YoungKind::Exp:
      m = std::max(1.0, std::ceil(q - 1.0));
      mfact = factorial(int(m));
      break;
    case YoungKind::Cosh: {
      int mi = std::max(1, int(std::ceil(q - 1.0)));
      if (mi % 2 == 0) ++mi;  // sinh carries only odd powers
      m = mi;
      mfact = factorial(mi);
      break;
    }
    default:
      throw InternalError("unreachable kernel kind");
  }
  WitnessPair W;
  W.K_eps = [](double eps) {
    require_eps(eps);
    return 0.0;
  };
  W.xi_eps = [A, q, m, mfact](double eps) {
    require_eps(eps);
    return 0.5 * A * std::pow(eps, q) * std::pow(0.5 * eps, m + 1.0 - q) / mfact;
  };
  return W;
}

bool witness_valid(const NormedSpace& S, const PsiFunction& Psi, const WitnessPair& W,
                   double eps) {
  require_eps(eps);
  double K = W.K_eps(eps);
  double xi = W.xi_eps(eps);
  if (K < 0.0 || !(xi > 0.0)) return false;
  double lo = std::max(K, 0.5 * eps) * 1.0001;
  double hi = 1e6 * std::max(K, 1.0);
  if (hi <= lo) hi = 10.0 * lo;
  const int n = 200;
  double ratio = std::pow(hi / lo, 1.0 / n);
  double t = lo;
  for (int i = 0; i <= n; ++i, t *= ratio)
    if (Psi.right_derivative(t) * delta_X(S, eps / t) * t < xi * (1.0 - 1e-9)) return false;
  return true;
}

Modulus psi_compose_modulus(const NormedSpace& S, const PsiFunction& Psi, const WitnessPair& W) {
  Modulus m;
  m.eval = [S, Psi, W](double eps) {
    require_eps(eps);
    double e = std::min(eps, 2.0);
    double K = W.K_eps(e / 8.0);
    double xi = W.xi_eps(e / 8.0);
    if (K < 0.0 || !(xi > 0.0)) throw InputError("witness must give K >= 0 and xi > 0");
    double near = Psi.delta(0.5 * e);
    double across = 0.25 * e * delta_X(S, e / std::max(0.5 * e, 8.0 * K)) *
                    Psi.right_derivative(0.25 * e);
    return std::min({near, across, xi});
  };
  m.provenance = "psi_compose";
  m.params = {{"p", S.p}};
  return m;
}

double prox_radius_bound(const YoungFunction& F, double r, double R0) {
  if (!(r > 0.0) || R0 < 0.0 || std::isnan(R0))
    throw InputError("prox_radius_bound requires r > 0 and R0 >= 0");
  double phi = young_density(F, R0);
  double arg = phi + (r + R0) * phi + young_eval(F, r + R0);
  return std::max(1.0, young_rho(F, arg));
}

Modulus prox_uc_modulus(const NormedSpace& S, const YoungFunction& F, double R) {
  if (!(R > 0.0)) throw InputError("prox_uc_modulus requires R > 0");
  Modulus m;
  m.eval = [S, F, R](double eps) {
    require_eps(eps);
    double v = std::min(0.5 * eps, 2.0 * compose_modulus(S, F, R, 0.5 * eps) / young_density(F, R));
    if (!(v > 0.0)) throw InputError(kUnderflowMsg);
    return v;
  };
  m.provenance = "prox_uc";
  m.eps_hi = 2.0 * R;
  m.params = {{"p", S.p}, {"R", R}};
  return m;
}

Modulus prox_uc_modulus_alt(const NormedSpace& S, const YoungFunction& F, double R, double lam) {
  if (!(R > 0.0)) throw InputError("prox_uc_modulus_alt requires R > 0");
  if (!(lam > 0.0) || !(lam <= 1.0)) throw InputError("step parameter must lie in (0, 1]");
  Modulus m;
  m.eval = [S, F, R, lam](double eps) {
    require_eps(eps);
    double scaled = compose_modulus(S, F, R / lam, 0.5 * eps / lam);
    double v = std::min(0.5 * eps, 2.0 * lam * scaled / young_density(F, R / lam));
    if (!(v > 0.0)) throw InputError(kUnderflowMsg);
    return v;
  };
  m.provenance = "prox_uc_alt";
  m.eps_hi = 2.0 * R;
  m.params = {{"p", S.p}, {"R", R}, {"lam", lam}};
  return m;
}

double lambda_threshold(const YoungFunction& F, const Modulus& space_mod, double eps,
                        double beta, double zeta) {
  if (!(eps > 0.0) || !(beta > 0.0) || !(zeta > 0.0))
    throw InputError("lambda_threshold requires eps, beta, zeta > 0");
  double tilde = 0.1 * eps * space_mod(eps / beta);
  if (!(tilde > 0.0)) throw InputError(kUnderflowMsg);
  double arg = 0.5 * tilde * young_density(F, 0.2 * eps) / zeta;
  if (!(arg > 0.0)) throw InputError(kUnderflowMsg);
  return std::min(1.0, 0.5 * young_eta(F, arg));
}

double hoelder_constant(double A, double p, double r) {
  require_power_inputs(A, p);
  if (!(r >= 1.0)) throw InputError("hoelder_constant requires r >= 1");
  return 16.0 * r * std::pow((3.0 * p + std::pow(2.0, p)) / (2.0 * A), 1.0 / p);
}

Modulus hoelder_modulus(double A, double p, double R) {
  require_power_inputs(A, p);
  if (!(R >= 1.0)) throw InputError("hoelder_modulus requires R >= 1");
  double c = 2.0 * A / (std::pow(16.0, p) * std::pow(R, p - 1.0));
  Modulus m;
  m.eval = [c, p](double eps) {
    require_eps(eps);
    return std::min(0.5 * eps, c * std::pow(eps, p));
  };
  m.provenance = "hoelder";
  m.eps_hi = 2.0 * R;
  m.params = {{"A", A}, {"p", p}, {"R", R}};
  return m;
}

RenormResult renorm(const NormedSpace& S, const std::function<double(const Vec&)>& f,
                    const std::function<double(double)>& f_modulus,
                    const std::function<double(double)>& omega_f0, double M) {
  if (!(M > 0.0)) throw InputError("renorm requires M > 0");

  // Deterministic probes decide whether f already has even symmetry.
  std::mt19937_64 gen(0x5eedULL);
  auto uniform = [&gen]() { return double(gen() >> 11) * 0x1.0p-53; };
  bool symmetric = true;
  for (int k = 0; k < 16 && symmetric; ++k) {
    Vec v(S.dim);
    for (auto& c : v) c = 2.0 * uniform() - 1.0;
    double n = norm(S, v);
    if (n > 1.0) v = scale(1.0 / n, v);
    double fv = f(v);
    if (std::fabs(fv - f(scale(-1.0, v))) > 1e-12 * (1.0 + std::fabs(fv))) symmetric = false;
  }
  std::function<double(const Vec&)> fs;
  if (symmetric)
    fs = f;
  else
    fs = [f](const Vec& x) { return 0.5 * (f(x) + f(scale(-1.0, x))); };

  if (std::fabs(fs(Vec(S.dim, 0.0))) > 1e-12) throw InputError("renorm requires f(0) = 0");

  double omega_M = omega_f0(M);
  if (!(omega_M > 0.0) || !(omega_M < 1.0))
    throw InputError("renorm requires 0 < omega_f0(M) < 1");
  double alpha = 0.5 * omega_M;
  double level = f_modulus(alpha);
  if (!(level > 0.0)) throw InputError("renorm requires f_modulus(alpha) > 0");
  double beta = omega_f0(level);
  if (!(beta > 0.0) || !(beta <= alpha))
    throw InputError("renorm requires 0 < omega_f0(level) <= alpha");

  auto member = [S, fs, level](const Vec& x) {
    return norm(S, x) <= 1.0 && fs(x) <= level;
  };

  auto gauge = [S, member](const Vec& x) -> GaugeBracket {
    double n = norm(S, x);
    if (n == 0.0) return GaugeBracket{0.0, 0.0};
    // The body sits inside the unit ball, so the gauge is at least n.
    double hi = n;
    if (member(scale(1.0 / hi, x))) return GaugeBracket{n * (1.0 - 1e-12), n};
    int grow = 0;
    while (!member(scale(1.0 / hi, x))) {
      hi *= 2.0;
      if (++grow > 200) throw InternalError("gauge bracket failed to close");
    }
    double lo = 0.5 * hi;
    for (int i = 0; i < 100; ++i) {
      double mid = 0.5 * (lo + hi);
      if (member(scale(1.0 / mid, x)))
        hi = mid;
      else
        lo = mid;
    }
    return GaugeBracket{lo, hi};
  };

  Modulus mod;
  double coef = omega_M / (4.0 * M * alpha);
  mod.eval = [f_modulus, beta, coef](double eps) {
    require_eps(eps);
    return coef * f_modulus(beta * std::min(eps, 2.0));
  };
  mod.provenance = "renorm";
  mod.params = {{"alpha", alpha}, {"beta", beta}, {"level", level}, {"M", M}};

  RenormResult res;
  res.alpha = alpha;
  res.beta = beta;
  res.level = level;
  res.symmetrized = !symmetric;
  res.member = member;
  res.gauge = gauge;
  res.modulus = std::move(mod);
  return res;
}

}  // namespace proxuc
