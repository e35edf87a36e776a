// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bloch_nitsche {

namespace {

constexpr double kTie = 1e-14;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& x, const Vec2& p, const Vec2& q)
{
    const Vec2 d = q - p;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (x - p).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p + t * d - x).norm();
}

double point_triangle_distance(const Vec2& x, const Triangle& tri)
{
    const Eigen::Vector3d lam = tri.barycentric(x);
    if (lam.minCoeff() >= 0.0) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) d = std::min(d, point_segment_distance(x, tri.v[i], tri.v[(i + 1) % 3]));
    return d;
}

// Signed distance to the circle with the tie band snapped to zero.
double signed_distance(const Vec2& x, const Inclusion& inc)
{
    const double s = (x - inc.center).norm() - inc.radius;
    return std::abs(s) <= kTie ? 0.0 : s;
}

bool bbox_overlaps(const Triangle& tri, const Inclusion& inc)
{
    for (int d = 0; d < 2; ++d) {
        const double lo = std::min({tri.v[0][d], tri.v[1][d], tri.v[2][d]});
        const double hi = std::max({tri.v[0][d], tri.v[1][d], tri.v[2][d]});
        if (hi < inc.center[d] - inc.radius - kTie || lo > inc.center[d] + inc.radius + kTie) return false;
    }
    return true;
}

// Roots of |p + t (q - p) - c|^2 = r^2, ascending; empty if the line misses.
std::vector<double> edge_roots(const Vec2& p, const Vec2& q, const Inclusion& inc, bool& tangent)
{
    const Vec2 d = q - p;
    const Vec2 f = p - inc.center;
    const double a = d.squaredNorm();
    const double b = 2.0 * d.dot(f);
    const double c = f.squaredNorm() - inc.radius * inc.radius;
    const double disc = b * b - 4.0 * a * c;
    tangent = false;
    const double scale = std::max(b * b, std::abs(4.0 * a * c));
    if (disc < -1e-14 * scale) return {};
    if (disc <= 1e-14 * scale) {
        tangent = true;
        return {-b / (2.0 * a)};
    }
    const double s = std::sqrt(disc);
    // Stable quadratic roots.
    const double qq = -0.5 * (b + std::copysign(s, b));
    double t0 = qq / a;
    double t1 = c / qq;
    if (t0 > t1) std::swap(t0, t1);
    return {t0, t1};
}

struct BoundaryItem {
    Vec2 x;
    bool crossing = false;
    double sign = 0.0;  // vertex side: < 0 inside the disc, > 0 outside
};

constexpr double kEndpointTol = 1e-12;

// Walk the triangle boundary counter-clockwise, listing vertices and crossing
// points. Validates the crossing pattern against the policy along the way.
std::vector<BoundaryItem> boundary_walk(const Triangle& input, const Inclusion& inc, long element, CutPolicy policy)
{
    Triangle tri = input;
    if (cross(tri.v[1] - tri.v[0], tri.v[2] - tri.v[0]) < 0.0) std::swap(tri.v[1], tri.v[2]);
    std::array<double, 3> s{};
    for (int i = 0; i < 3; ++i) s[i] = signed_distance(tri.v[i], inc);

    std::vector<BoundaryItem> items;
    int crossings = 0;
    bool sameEdge = false;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const Vec2& p = tri.v[i];
        const Vec2& q = tri.v[j];
        if (s[i] == 0.0) {
            items.push_back({p, true, 0.0});
            ++crossings;
        } else {
            items.push_back({p, false, s[i]});
        }

        bool tangent = false;
        std::vector<double> roots = edge_roots(p, q, inc, tangent);
        std::vector<double> interior;
        for (double t : roots) {
            if (t <= kEndpointTol || t >= 1.0 - kEndpointTol) continue;
            // Root belonging to an endpoint that sits on the circle.
            if (s[i] == 0.0 && std::abs(t) < 1e-8) continue;
            if (s[j] == 0.0 && std::abs(t - 1.0) < 1e-8) continue;
            interior.push_back(t);
        }
        if (tangent && !interior.empty())
            throw AssumptionViolation(element, "interface is tangent to an element edge", ViolationKind::Tangency);
        if (interior.size() > 1) sameEdge = true;
        for (double t : interior) {
            items.push_back({p + t * (q - p), true, 0.0});
            ++crossings;
        }
    }
    if (sameEdge) {
        if (policy == CutPolicy::Strict)
            throw AssumptionViolation(element, "interface crosses an open edge more than once",
                                      ViolationKind::SameEdge);
        if (crossings % 2 != 0)
            throw AssumptionViolation(element, "interface meets the element boundary an odd number of times",
                                      ViolationKind::CrossingCount);
    } else if (crossings != 2) {
        throw AssumptionViolation(element, "interface meets the element boundary " + std::to_string(crossings) +
                                               " times instead of exactly twice",
                                  ViolationKind::CrossingCount);
    }
    return items;
}

}  // namespace

std::pair<Vec2, Vec2> dual_lattice(const Vec2& v1, const Vec2& v2)
{
    const double det = cross(v1, v2);
    if (std::abs(det) < 1e-14) throw GeometryError("degenerate lattice basis: |v1 x v2| < 1e-14");
    // Rows of the inverse of [v1 v2].
    const Vec2 r1(v2.y() / det, -v2.x() / det);
    const Vec2 r2(-v1.y() / det, v1.x() / det);
    return {2.0 * kPi * r1, 2.0 * kPi * r2};
}

HexLattice HexLattice::from_basis(const Vec2& v1, const Vec2& v2)
{
    HexLattice lat;
    lat.v1 = v1;
    lat.v2 = v2;
    std::tie(lat.k1, lat.k2) = dual_lattice(v1, v2);
    lat.cellArea = std::abs(cross(v1, v2));
    return lat;
}

HexLattice HexLattice::honeycomb()
{
    const double s3 = std::sqrt(3.0);
    return from_basis(Vec2(s3 / 2.0, 0.5), Vec2(s3 / 2.0, -0.5));
}

Vec2 HexLattice::coordinates(const Vec2& x) const
{
    // k_i . x = 2 pi t_i
    return Vec2(k1.dot(x), k2.dot(x)) / (2.0 * kPi);
}

SymmetryPoints high_symmetry_points(const HexLattice& lattice)
{
    SymmetryPoints p;
    p.gamma = Vec2::Zero();
    p.k = (lattice.k1 - lattice.k2) / 3.0;
    p.kprime = -p.k;
    p.m = (lattice.k1 + lattice.k2) / 2.0;
    return p;
}

WrappedPoint wrap_to_cell(const Vec2& x, const HexLattice& lattice)
{
    Vec2 t = lattice.coordinates(x);
    WrappedPoint out;
    for (int d = 0; d < 2; ++d) {
        const double nearest = std::round(t[d]);
        if (std::abs(t[d] - nearest) < 1e-12) t[d] = nearest;
        out.shift[d] = static_cast<long>(std::floor(t[d]));
    }
    out.x = x - static_cast<double>(out.shift[0]) * lattice.v1 - static_cast<double>(out.shift[1]) * lattice.v2;
    return out;
}

std::vector<Inclusion> honeycomb_inclusions(const HexLattice& lattice, double r)
{
    const Vec2 a = lattice.site_a();
    const Vec2 b = lattice.site_b();
    if (!(r > 0.0) || r >= 0.5 * (a - b).norm())
        throw GeometryError("inclusion radius must satisfy 0 < r < |A - B|/2");
    return {Inclusion{a, r, Site::A}, Inclusion{b, r, Site::B}};
}

double Triangle::area() const { return 0.5 * std::abs(cross(v[1] - v[0], v[2] - v[0])); }

double Triangle::diameter() const
{
    return std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
}

Eigen::Vector3d Triangle::barycentric(const Vec2& x) const
{
    const double det = cross(v[1] - v[0], v[2] - v[0]);
    const double l1 = cross(x - v[0], v[2] - v[0]) / det;
    const double l2 = cross(v[1] - v[0], x - v[0]) / det;
    return Eigen::Vector3d(1.0 - l1 - l2, l1, l2);
}

std::array<Vec2, 3> Triangle::basis_gradients() const
{
    const double det = cross(v[1] - v[0], v[2] - v[0]);
    std::array<Vec2, 3> g;
    for (int i = 0; i < 3; ++i) {
        const Vec2& p = v[(i + 1) % 3];
        const Vec2& q = v[(i + 2) % 3];
        // Rotate the opposite edge by -90 degrees and scale by 1/(2|K|).
        g[i] = Vec2(p.y() - q.y(), q.x() - p.x()) / det;
    }
    return g;
}

Classification classify_triangle(const Triangle& tri, std::span<const Inclusion> inclusions, long element,
                                 CutPolicy policy)
{
    int cutting = -1;
    for (std::size_t i = 0; i < inclusions.size(); ++i) {
        const Inclusion& inc = inclusions[i];
        if (!bbox_overlaps(tri, inc)) continue;
        const double dmin = point_triangle_distance(inc.center, tri);
        double dmax = 0.0;
        for (const Vec2& p : tri.v) dmax = std::max(dmax, (p - inc.center).norm());
        if (dmin <= inc.radius + kTie && dmax >= inc.radius - kTie) {
            if (cutting >= 0) throw AssumptionViolation(element, "element is cut by more than one interface circle",
                                          ViolationKind::MultipleCircles);
            cutting = static_cast<int>(i);
        }
    }
    if (cutting >= 0) {
        boundary_walk(tri, inclusions[cutting], element, policy);
        return {ElementKind::Interface, cutting};
    }
    const Vec2 centroid = (tri.v[0] + tri.v[1] + tri.v[2]) / 3.0;
    for (std::size_t i = 0; i < inclusions.size(); ++i) {
        if ((centroid - inclusions[i].center).norm() < inclusions[i].radius)
            return {ElementKind::Inner, static_cast<int>(i)};
    }
    return {ElementKind::Outer, -1};
}

CutGeometry cut_triangle(const Triangle& tri, const Inclusion& inc, int mArc, long element, CutPolicy policy)
{
    if (mArc < 1) throw GeometryError("mArc must be at least 1");
    const std::vector<BoundaryItem> items = boundary_walk(tri, inc, element, policy);
    const std::size_t n = items.size();

    std::vector<std::size_t> cross_idx;
    for (std::size_t i = 0; i < n; ++i)
        if (items[i].crossing) cross_idx.push_back(i);
    const std::size_t nc = cross_idx.size();

    // Boundary piece c -> next crossing lies inside the disc iff its first sub-segment does.
    std::vector<char> inside(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const Vec2 mid = 0.5 * (items[cross_idx[c]].x + items[(cross_idx[c] + 1) % n].x);
        inside[c] = (mid - inc.center).norm() < inc.radius;
    }
    for (std::size_t c = 0; c < nc; ++c)
        if (inside[c] == inside[(c + 1) % nc]) throw GeometryError("malformed cut: crossings do not alternate");

    const auto angle = [&](const Vec2& x) { return std::atan2(x.y() - inc.center.y(), x.x() - inc.center.x()); };
    const auto items_between = [&](std::size_t from, std::size_t to) {
        std::vector<Vec2> out;
        for (std::size_t i = (from + 1) % n; i != to; i = (i + 1) % n) out.push_back(items[i].x);
        return out;
    };

    // K_1 = K cap disc is convex: inside boundary pieces joined by arcs traversed
    // counter-clockwise about the center. Each outside piece closes with the
    // reversed arc into one polygon of K_2.
    CutGeometry g;
    for (std::size_t c = 0; c < nc; ++c) {
        if (inside[c]) {
            const std::size_t a = cross_idx[c], b = cross_idx[(c + 1) % nc];
            g.side1.push_back(items[a].x);
            for (const Vec2& x : items_between(a, b)) g.side1.push_back(x);
            continue;
        }
        const std::size_t ia = cross_idx[c], ib = cross_idx[(c + 1) % nc];
        const Vec2 p = items[ia].x, q = items[ib].x;
        const double ap = angle(p);
        double span = std::fmod(angle(q) - ap + 4.0 * kPi, 2.0 * kPi);
        if (span <= 0.0) span += 2.0 * kPi;

        std::vector<Vec2> arc(static_cast<std::size_t>(mArc) + 1);
        arc.front() = p;
        arc.back() = q;
        for (int k = 1; k < mArc; ++k) {
            const double t = ap + span * k / mArc;
            arc[k] = inc.center + inc.radius * Vec2(std::cos(t), std::sin(t));
        }
        for (int k = 0; k < mArc; ++k) {
            const double t = ap + span * (k + 0.5) / mArc;
            GammaSegment seg;
            seg.a = arc[k];
            seg.b = arc[k + 1];
            seg.normal = Vec2(std::cos(t), std::sin(t));
            g.gammaLength += seg.length();
            g.gamma.push_back(seg);
        }
        // The arc replaces the outside piece in K_1 ...
        g.side1.push_back(p);
        for (int k = 1; k < mArc; ++k) g.side1.push_back(arc[k]);
        // ... and closes it in K_2.
        std::vector<Vec2> piece{p};
        for (const Vec2& x : items_between(ia, ib)) piece.push_back(x);
        piece.push_back(q);
        for (int k = mArc - 1; k >= 1; --k) piece.push_back(arc[k]);
        g.area2 += polygon_area(piece);
        g.side2.push_back(std::move(piece));
    }
    // Consecutive duplicates appear where an inside piece ends at the arc start.
    g.side1.erase(std::unique(g.side1.begin(), g.side1.end()), g.side1.end());
    if (g.side1.size() > 1 && g.side1.front() == g.side1.back()) g.side1.pop_back();
    g.area1 = polygon_area(g.side1);
    if (g.area1 < 0.0 || g.area2 < 0.0) throw GeometryError("malformed cut: sub-cell orientation");
    return g;
}

double polygon_area(std::span<const Vec2> polygon)
{
    double a = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(polygon[i], polygon[(i + 1) % n]);
    return 0.5 * a;
}

std::vector<QuadPoint> triangle_quadrature(const Triangle& tri, int order)
{
    struct Ref {
        double l0, l1, l2, w;
    };
    static const std::vector<Ref> deg1{{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}};
    static const std::vector<Ref> deg2{{2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
                                       {1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3},
                                       {1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3}};
    // Six-point symmetric rule of degree 4, all weights positive.
    static const std::vector<Ref> deg4 = [] {
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        return std::vector<Ref>{{1 - 2 * a1, a1, a1, w1}, {a1, 1 - 2 * a1, a1, w1}, {a1, a1, 1 - 2 * a1, w1},
                                {1 - 2 * a2, a2, a2, w2}, {a2, 1 - 2 * a2, a2, w2}, {a2, a2, 1 - 2 * a2, w2}};
    }();
    if (order < 1 || order > 4) throw GeometryError("quadrature order must be in 1..4");
    const std::vector<Ref>& rule = order == 1 ? deg1 : order == 2 ? deg2 : deg4;
    const double area = tri.area();
    std::vector<QuadPoint> out;
    out.reserve(rule.size());
    for (const Ref& r : rule) out.push_back({r.l0 * tri.v[0] + r.l1 * tri.v[1] + r.l2 * tri.v[2], r.w * area});
    return out;
}

std::vector<Triangle> triangulate_polygon(std::span<const Vec2> polygon)
{
    std::vector<Vec2> pts(polygon.begin(), polygon.end());
    if (pts.size() < 3) return {};
    if (polygon_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());

    double scale = 0.0;
    for (const Vec2& p : pts) scale = std::max(scale, (p - pts[0]).norm());
    const double flat = 1e-14 * scale * scale;

    std::vector<Triangle> out;
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    std::size_t guard = 0;
    while (idx.size() > 3) {
        const std::size_t n = idx.size();
        bool clipped = false;
        for (std::size_t k = 0; k < n && !clipped; ++k) {
            const Vec2& a = pts[idx[(k + n - 1) % n]];
            const Vec2& b = pts[idx[k]];
            const Vec2& c = pts[idx[(k + 1) % n]];
            const double turn = cross(b - a, c - b);
            if (std::abs(turn) <= flat) {
                idx.erase(idx.begin() + static_cast<long>(k));
                clipped = true;
                break;
            }
            if (turn < 0.0) continue;
            const Triangle ear{{a, b, c}};
            bool blocked = false;
            for (std::size_t m = 0; m < n && !blocked; ++m) {
                if (m == k || m == (k + 1) % n || m == (k + n - 1) % n) continue;
                blocked = ear.barycentric(pts[idx[m]]).minCoeff() > 1e-12;
            }
            if (blocked) continue;
            out.push_back(ear);
            idx.erase(idx.begin() + static_cast<long>(k));
            clipped = true;
        }
        if (!clipped || ++guard > 4 * pts.size()) throw GeometryError("polygon triangulation failed");
    }
    const Triangle last{{pts[idx[0]], pts[idx[1]], pts[idx[2]]}};
    if (cross(last.v[1] - last.v[0], last.v[2] - last.v[0]) > flat) out.push_back(last);
    return out;
}

std::vector<QuadPoint> polygon_quadrature(std::span<const Vec2> polygon, int order)
{
    std::vector<QuadPoint> out;
    for (const Triangle& t : triangulate_polygon(polygon)) {
        auto q = triangle_quadrature(t, order);
        out.insert(out.end(), q.begin(), q.end());
    }
    return out;
}

CutQuadrature subcell_quadrature(const CutGeometry& geom, int order)
{
    if (order < 1 || order > 3) throw GeometryError("subcell quadrature order must be in 1..3");
    CutQuadrature q;
    q.side1 = polygon_quadrature(geom.side1, order);
    for (const auto& piece : geom.side2) {
        auto r = polygon_quadrature(piece, order);
        q.side2.insert(q.side2.end(), r.begin(), r.end());
    }

    // Gauss-Legendre on [0, 1], exact to degree 2n - 1.
    static const double g1x[] = {0.5}, g1w[] = {1.0};
    static const double g2x[] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)}, g2w[] = {0.5, 0.5};
    const bool two = order >= 2;
    const double* gx = two ? g2x : g1x;
    const double* gw = two ? g2w : g1w;
    const int ng = two ? 2 : 1;
    for (const GammaSegment& seg : geom.gamma) {
        const double len = seg.length();
        for (int i = 0; i < ng; ++i) q.gamma.push_back({seg.a + gx[i] * (seg.b - seg.a), gw[i] * len, seg.normal});
    }
    return q;
}

}  // namespace bloch_nitsche
