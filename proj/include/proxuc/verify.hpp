#ifndef PROXUC_VERIFY_HPP
#define PROXUC_VERIFY_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "proxuc/prox.hpp"
#include "proxuc/spaces.hpp"
#include "proxuc/young.hpp"

namespace proxuc {

// Deterministic sampler: every check derives all randomness from one seeded
// stream, consumed sequentially, so reports replay bit-for-bit.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec box(int dim, double lo, double hi) {
    Vec v(dim);
    for (auto& c : v) c = uniform(lo, hi);
    return v;
  }
  // Unit vector in the space's own norm.
  Vec direction(const NormedSpace& S);
  // Point of B(center, r); roughly uniform with a boundary bias, since the
  // inequalities under test are tight near spheres.
  Vec in_ball(const NormedSpace& S, const Vec& center, double r);
  // Pair in B(center, r) with separation >= sep; mixes generic, near-sphere
  // and antipodal draws.
  std::pair<Vec, Vec> separated_pair(const NormedSpace& S, const Vec& center, double r,
                                     double sep);

 private:
  std::mt19937_64 gen_;
};

enum class CheckKind {
  UniformContinuity,
  Nonexpansiveness,
  VariationalInequality,
  HoelderContinuity,
  SweepMonotonicity,
  ProjectionConvergence,
  ModulusInequalities,
  DualityMonotonicity,
};

std::string check_kind_name(CheckKind k);
std::optional<CheckKind> parse_check_kind(const std::string& name);
std::vector<CheckKind> all_check_kinds();
// One-line human description, for the CLI listing.
std::string check_kind_summary(CheckKind k);

// Everything a check needs, fully value-typed so configuration files map
// onto it field by field. Unused fields are ignored by kinds that do not
// read them.
struct CheckSpec {
  std::string name;  // report identifier, also the JSON file stem
  CheckKind kind = CheckKind::UniformContinuity;
  double space_p = 2.0;
  int dim = 2;
  std::string young = "power";  // power | exp | cosh
  double young_p = 2.0;
  std::string objective = "zero";  // zero | quadratic | l1 | ball | box | maxaffine
  std::string prox_kind = "young";  // young | pr | both (variational inequality)
  // uniform_continuity: lambda_free | lambda_dependent;
  // modulus_inequalities: space | compose | power_norm | psi_compose | renorm
  std::string variant;
  Vec center;  // base-ball center; sized to dim with zeros when empty
  double ball_radius = 1.0;
  std::vector<double> eps_grid = {0.5, 1.0, 1.5};
  std::vector<double> lam_grid = {1.0, 0.3, 0.1, 0.03, 0.01};
  int samples = 1000;  // target number of recorded margins
  std::uint64_t seed = 0;
  double tol = 1e-8;    // solver gap target
  int budget = 200000;  // iteration budget per solve
  bool grid_backstop = false;  // variational inequality: cross-check vs grid
  double hoelder_r = 1.0;
};

// Outcome of one check. min_margin is slack-adjusted: negative means the
// inequality under test was violated beyond every certificate involved.
struct CheckOutcome {
  std::string name;
  CheckKind kind = CheckKind::UniformContinuity;
  bool pass = true;
  long samples = 0;
  long violations = 0;
  long solver_failures = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> margins;  // every recorded margin, sample order
  std::string witness_json;     // worst instance, replayable
  std::vector<std::string> notes;
  double runtime_seconds = 0.0;
};

// Build the stock objective a spec names, consuming the rng stream.
ConvexFunction make_objective(const NormedSpace& S, const std::string& kind, SampleRng& rng);

CheckOutcome run_check(const CheckSpec& spec);

// Cross-check of a proximal solve against a dense grid scan of the same
// objective over a box around the reported minimizer. Two sound claims:
//   value_margin    = grid best - (reported value - certified gap) + float slack;
//                     any grid point beating the certificate drives this negative.
//   distance_margin = distance_bound + resolution-rounding + localization
//                     - |grid argmin - reported minimizer|.
// localization is the radius of the grid's own near-optimal sublevel set; flat
// valleys (projections onto curved sets, degenerate radial curvature) make the
// grid argmin wander inside it, so a bare resolution term would be unsound.
struct GridAgreement {
  Vec grid_point;
  double grid_value = 0.0;
  double value_margin = 0.0;
  double distance_margin = 0.0;
  double localization = 0.0;
  double resolution = 0.0;
};
GridAgreement grid_agreement(const NormedSpace& S, const ConvexFunction& f,
                             const YoungFunction& F, double lam, bool pr, const Vec& x,
                             const ProxResult& result, double resolution);

}  // namespace proxuc

#endif
