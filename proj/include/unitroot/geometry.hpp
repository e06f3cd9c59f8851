#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unitroot/rational.hpp"

namespace ur {

using LatticePoint = std::vector<long>;
using RationalPoint = std::vector<Rational>;

std::string format_point(const LatticePoint& u);

struct Facet {
  RationalPoint normal;  // <normal, x> = offset on the facet, offset = 1 away from the origin
  Rational offset;
};

// Newton polytope at infinity of a finite generator set, with its weight function.
struct WeightedGeometry {
  std::vector<RationalPoint> generators;
  std::vector<RationalPoint> vertices;  // hull vertices other than the origin
  std::vector<Facet> facets;            // facets not through the origin
  long D = 1;
  int dim = 0;
};

// nullopt encodes a point outside the cone.
using Weight = std::optional<Rational>;

WeightedGeometry build_newton(const std::vector<LatticePoint>& generators);
WeightedGeometry build_newton_rational(const std::vector<RationalPoint>& generators, int dim);

Weight weight(const WeightedGeometry& geom, const LatticePoint& u);

struct MonoidSlice {
  std::vector<LatticePoint> points;
  std::vector<Rational> weights;
  Rational weight_cap;

  std::size_t size() const { return points.size(); }
  // Position of u, or -1.
  long index_of(const LatticePoint& u) const;
};

MonoidSlice enumerate_monoid(const WeightedGeometry& geom, const Rational& weight_cap);

struct DeformationTerm {
  LatticePoint gamma;
  LatticePoint v;
};

WeightedGeometry relative_polytope(const std::vector<DeformationTerm>& suppP, const WeightedGeometry& geomF, int s);

// Points of M(geom) ∩ -M(geom) up to the cap.
MonoidSlice enumerate_unit_monoid(const WeightedGeometry& geom, const Rational& weight_cap);

}  // namespace ur
