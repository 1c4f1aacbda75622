#ifndef PROXUC_TESTS_SUPPORT_HPP
#define PROXUC_TESTS_SUPPORT_HPP

#include <random>

#include "proxuc/spaces.hpp"

namespace proxuc::testing {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  double uniform() { return double(gen() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  Vec vec(int dim, double lo, double hi) {
    Vec v(dim);
    for (auto& c : v) c = uniform(lo, hi);
    return v;
  }
  Vec in_ball(const NormedSpace& S, double radius = 1.0) {
    for (;;) {
      Vec v = vec(S.dim, -1.0, 1.0);
      if (norm(S, v) <= 1.0) return scale(radius, v);
    }
  }
  Vec direction(const NormedSpace& S) {
    for (;;) {
      Vec v = vec(S.dim, -1.0, 1.0);
      double n = norm(S, v);
      if (n > 0.1) return scale(1.0 / n, v);
    }
  }
};

}  // namespace proxuc::testing

#endif
