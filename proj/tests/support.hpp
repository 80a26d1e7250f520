#pragma once

#include "cogmc/model.hpp"

#include <random>

namespace cogmc::test {

inline Vec3 random_point(std::mt19937_64& rng, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  return Vec3(u(rng), u(rng), u(rng));
}

// Valid topology with a little clearance everywhere, so the reflection
// series converges well inside its default term budget.
inline Topology random_topology(std::mt19937_64& rng, double half_width = 40.0) {
  std::uniform_real_distribution<double> radius(1.0, 8.0);
  for (;;) {
    Topology t;
    t.a_P = radius(rng);
    t.a_S = radius(rng);
    t.y_P = random_point(rng, half_width);
    t.y_S = random_point(rng, half_width);
    t.x_P = random_point(rng, half_width);
    t.x_S = random_point(rng, half_width);
    if ((t.y_P - t.y_S).norm() < t.a_P + t.a_S + 1.0) continue;
    bool clear = true;
    for (Link m : {Link::Primary, Link::Secondary})
      for (Link i : {Link::Primary, Link::Secondary})
        clear = clear && (t.tx(m) - t.rx(i)).norm() > t.radius(i) + 1.0;
    if (clear) return t;
  }
}

}  // namespace cogmc::test
