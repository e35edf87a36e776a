// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Lattice geometry, circular inclusions and the triangle/circle cut.

#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "bloch_nitsche/types.hpp"

namespace bloch_nitsche {

/// Solve k_i . v_j = 2 pi delta_ij. Throws GeometryError if |v1 x v2| < 1e-14.
std::pair<Vec2, Vec2> dual_lattice(const Vec2& v1, const Vec2& v2);

struct HexLattice {
    Vec2 v1, v2;  // lattice basis
    Vec2 k1, k2;  // dual basis
    double cellArea = 0.0;

    static HexLattice from_basis(const Vec2& v1, const Vec2& v2);
    /// v1 = (sqrt3/2, 1/2), v2 = (sqrt3/2, -1/2).
    static HexLattice honeycomb();

    Vec2 point(double t1, double t2) const { return t1 * v1 + t2 * v2; }
    /// Lattice coordinates (t1, t2) with x = t1 v1 + t2 v2.
    Vec2 coordinates(const Vec2& x) const;
    /// A = (v1 + v2) / 3 and B = 2 (v1 + v2) / 3.
    Vec2 site_a() const { return (v1 + v2) / 3.0; }
    Vec2 site_b() const { return 2.0 * (v1 + v2) / 3.0; }
};

struct SymmetryPoints {
    Vec2 gamma, k, kprime, m;
};

/// Gamma = 0, K = (k1 - k2)/3, K' = -K, M = (k1 + k2)/2.
SymmetryPoints high_symmetry_points(const HexLattice& lattice);

struct WrappedPoint {
    Vec2 x;
    std::array<long, 2> shift{0, 0};
};

/// Map x into the half-open cell {t1 v1 + t2 v2 : 0 <= t_j < 1}; x = wrapped + shift . (v1, v2).
WrappedPoint wrap_to_cell(const Vec2& x, const HexLattice& lattice);

enum class Site { A, B };

struct Inclusion {
    Vec2 center;
    double radius = 0.0;
    Site site = Site::A;
};

/// Discs of radius r at A and B of the fundamental cell. Requires r < |A - B| / 2.
std::vector<Inclusion> honeycomb_inclusions(const HexLattice& lattice, double r);

struct Triangle {
    std::array<Vec2, 3> v;
    double area() const;
    double diameter() const;
    /// Barycentric coordinates of x.
    Eigen::Vector3d barycentric(const Vec2& x) const;
    /// Gradients of the three nodal basis functions (constant on the triangle).
    std::array<Vec2, 3> basis_gradients() const;
};

enum class ElementKind { Inner, Outer, Interface };

struct Classification {
    ElementKind kind = ElementKind::Outer;
    int inclusion = -1;  // index of the cutting (Interface) or containing (Inner) disc
};

/// Strict rejects every departure from the two-crossing requirement;
/// AllowSameEdge accepts two crossings on one open edge.
enum class CutPolicy { Strict, AllowSameEdge };

/// Interface iff some circle meets the closed triangle (distance ties within 1e-14
/// count as meeting); otherwise the centroid decides the side. Throws
/// AssumptionViolation carrying `element` when an interface element is cut in a
/// way other than two boundary crossings with at most one per open edge.
Classification classify_triangle(const Triangle& tri, std::span<const Inclusion> inclusions,
                                 long element = -1, CutPolicy policy = CutPolicy::Strict);

struct GammaSegment {
    Vec2 a, b;
    Vec2 normal;         // unit, from inside the disc to outside
    bool onArc = true;   // endpoints lie on the exact circle
    double length() const { return (b - a).norm(); }
};

struct CutGeometry {
    std::vector<Vec2> side1;               // K_1 = K inside the disc (convex), counter-clockwise
    std::vector<std::vector<Vec2>> side2;  // pieces of K_2, counter-clockwise
    std::vector<GammaSegment> gamma;
    double area1 = 0.0, area2 = 0.0, gammaLength = 0.0;
};

/// Split an interface triangle by the circle, replacing each arc inside the
/// triangle with an mArc-segment chord polyline. K_2 has one piece per arc.
CutGeometry cut_triangle(const Triangle& tri, const Inclusion& inc, int mArc, long element = -1,
                         CutPolicy policy = CutPolicy::Strict);

struct QuadPoint {
    Vec2 x;
    double w = 0.0;
};

struct LineQuadPoint {
    Vec2 x;
    double w = 0.0;
    Vec2 normal;
};

struct CutQuadrature {
    std::vector<QuadPoint> side1, side2;
    std::vector<LineQuadPoint> gamma;
};

/// Positive-weight rule exact for total degree `order` (1..4) on a triangle.
std::vector<QuadPoint> triangle_quadrature(const Triangle& tri, int order);
/// Rule on a simple polygon via ear-clipping triangulation; empty polygon gives an empty rule.
std::vector<QuadPoint> polygon_quadrature(std::span<const Vec2> polygon, int order);
/// Triangulate a simple polygon (any orientation) into positively oriented triangles.
std::vector<Triangle> triangulate_polygon(std::span<const Vec2> polygon);
/// Volume rules on both sides plus (order+1)/2-point Gauss rules on every interface chord.
CutQuadrature subcell_quadrature(const CutGeometry& geom, int order);

double polygon_area(std::span<const Vec2> polygon);

}  // namespace bloch_nitsche
