#include "cogmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cogmc {

std::string_view name(Link l) { return l == Link::Primary ? "P" : "S"; }

double MediumParams::half_life() const {
  return mu > 0 ? std::log(2.0) / mu : std::numeric_limits<double>::infinity();
}

void MediumParams::check() const {
  if (!(D > 0) || !std::isfinite(D)) throw std::invalid_argument("medium: D must be positive");
  if (!(Tb > 0) || !std::isfinite(Tb)) throw std::invalid_argument("medium: Tb must be positive");
  if (!(mu >= 0)) throw std::invalid_argument("medium: mu must be non-negative");
}

void check_topology(const Topology& topo) {
  if (!topo.x_P.allFinite() || !topo.x_S.allFinite() || !topo.y_P.allFinite() ||
      !topo.y_S.allFinite())
    throw std::invalid_argument("topology: non-finite coordinate");
  if (!(topo.a_P >= 0) || !(topo.a_S >= 0))
    throw std::invalid_argument("topology: receiver radius must be non-negative");
  if (topo.a_P == 0 && topo.a_S == 0)
    throw std::invalid_argument("topology: at least one receiver needs a positive radius");
  if (!((topo.y_P - topo.y_S).norm() > topo.a_P + topo.a_S))
    throw std::invalid_argument("topology: receivers overlap");
  for (Link m : {Link::Primary, Link::Secondary}) {
    for (Link i : {Link::Primary, Link::Secondary}) {
      if (!((topo.tx(m) - topo.rx(i)).norm() > topo.radius(i))) {
        std::ostringstream os;
        os << "topology: TX_" << name(m) << " lies on or inside FAR_" << name(i);
        throw std::invalid_argument(os.str());
      }
    }
  }
}

TwoFarGeometry TwoFarGeometry::swapped() const {
  TwoFarGeometry g = *this;
  std::swap(g.r_target, g.r_other);
  std::swap(g.R_target_other, g.R_other_target);
  std::swap(g.a_target, g.a_other);
  return g;
}

TwoFarGeometry derive_geometry(const Topology& topo, Link tx, Link target) {
  check_topology(topo);
  if (!(topo.radius(target) > 0))
    throw std::invalid_argument("derive_geometry: target receiver has zero radius");
  return make_geometry(topo.tx(tx), topo.rx(target), topo.rx(other(target)), topo.radius(target),
                       topo.radius(other(target)));
}

bool ValidityReport::all_ok() const {
  bool ok = separation_ok;
  for (const auto& row : far_field_ok)
    for (bool b : row) ok = ok && b;
  return ok;
}

ValidityReport validate_topology(const Topology& topo, double factor) {
  ValidityReport rep;
  for (Link m : {Link::Primary, Link::Secondary}) {
    for (Link i : {Link::Primary, Link::Secondary}) {
      const double r = (topo.tx(m) - topo.rx(i)).norm();
      if (r < factor * topo.radius(i)) {
        rep.far_field_ok[index(m)][index(i)] = false;
        std::ostringstream os;
        os << "TX_" << name(m) << " is " << r << " um from FAR_" << name(i) << " (< " << factor
           << " * a_" << name(i) << "); hitting probabilities lose accuracy";
        rep.messages.push_back(os.str());
      }
    }
  }
  const double sep = (topo.y_P - topo.y_S).norm();
  const double amax = std::max(topo.a_P, topo.a_S);
  if (sep < factor * amax) {
    rep.separation_ok = false;
    std::ostringstream os;
    os << "receiver separation " << sep << " um is below " << factor
       << " * max(a_P, a_S); mutual-influence approximation is coarse";
    rep.messages.push_back(os.str());
  }
  if (topo.a_P == 0 || topo.a_S == 0)
    rep.messages.push_back("one receiver has zero radius; it never absorbs");
  return rep;
}

}  // namespace cogmc
