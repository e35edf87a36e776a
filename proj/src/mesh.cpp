// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

namespace bloch_nitsche {

namespace {

TriMesh build_structured(const HexLattice& lattice, Topology topo, int N, int L)
{
    TriMesh m;
    m.topology = topo;
    m.lattice = lattice;
    m.N = N;
    m.L = L;
    m.rows = topo == Topology::Torus ? N : 2 * L * N;
    m.tMin = topo == Topology::Torus ? 0.0 : -static_cast<double>(L);
    m.h = lattice.v1.norm() / N;

    const int nv = (N + 1) * (m.rows + 1);
    m.vertices.resize(nv);
    m.periodicMap.resize(nv);
    m.dirichlet.assign(nv, 0);
    for (int j = 0; j <= m.rows; ++j) {
        for (int i = 0; i <= N; ++i) {
            const int v = m.vertex_index(i, j);
            // Periodic copies are exact translates of their representatives.
            if (i == N)
                m.vertices[v] = m.vertices[m.vertex_index(0, j)] + lattice.v1;
            else if (topo == Topology::Torus && j == N)
                m.vertices[v] = m.vertices[m.vertex_index(i, 0)] + lattice.v2;
            else
                m.vertices[v] = lattice.point(static_cast<double>(i) / N, m.tMin + static_cast<double>(j) / N);
            const int jr = topo == Topology::Torus ? j % N : j;
            m.periodicMap[v] = m.vertex_index(i % N, jr);
            if (topo == Topology::Cylinder && (j == 0 || j == m.rows)) m.dirichlet[v] = 1;
        }
    }
    m.numClasses = topo == Topology::Torus ? N * N : N * (m.rows + 1);

    m.triangles.reserve(2 * static_cast<std::size_t>(N) * m.rows);
    for (int j = 0; j < m.rows; ++j) {
        for (int i = 0; i < N; ++i) {
            const int p00 = m.vertex_index(i, j), p10 = m.vertex_index(i + 1, j);
            const int p01 = m.vertex_index(i, j + 1), p11 = m.vertex_index(i + 1, j + 1);
            m.triangles.push_back({p00, p10, p01});
            m.triangles.push_back({p10, p11, p01});
        }
    }
    return m;
}

// Inclusions bucketed by the lattice cell holding their center.
class InclusionIndex {
public:
    InclusionIndex(const TriMesh& mesh, const std::vector<Inclusion>& inclusions)
        : mesh_(mesh), inclusions_(inclusions), all_(inclusions.size() < 8 || mesh.h > 0.25)
    {
        for (std::size_t i = 0; i < inclusions.size(); ++i) {
            const Vec2 t = mesh.lattice.coordinates(inclusions[i].center);
            buckets_[{static_cast<long>(std::floor(t[0])), static_cast<long>(std::floor(t[1]))}].push_back(
                static_cast<int>(i));
        }
    }

    /// Global indices of the discs that can touch `tri`, ascending.
    std::vector<int> candidates(const Triangle& tri) const
    {
        std::vector<int> ids;
        if (all_) {
            for (std::size_t i = 0; i < inclusions_.size(); ++i) ids.push_back(static_cast<int>(i));
            return ids;
        }
        const Vec2 t = mesh_.lattice.coordinates((tri.v[0] + tri.v[1] + tri.v[2]) / 3.0);
        const long c0 = static_cast<long>(std::floor(t[0])), c1 = static_cast<long>(std::floor(t[1]));
        for (long a = c0 - 1; a <= c0 + 1; ++a)
            for (long b = c1 - 1; b <= c1 + 1; ++b) {
                auto it = buckets_.find({a, b});
                if (it != buckets_.end()) ids.insert(ids.end(), it->second.begin(), it->second.end());
            }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    std::vector<Inclusion> gather(const std::vector<int>& ids) const
    {
        std::vector<Inclusion> out;
        out.reserve(ids.size());
        for (int i : ids) out.push_back(inclusions_[i]);
        return out;
    }

private:
    const TriMesh& mesh_;
    const std::vector<Inclusion>& inclusions_;
    bool all_;
    std::map<std::pair<long, long>, std::vector<int>> buckets_;
};

}  // namespace

std::size_t TriMesh::locate(const Vec2& t) const
{
    const double a = t[0] * N;
    const double b = (t[1] - tMin) * N;
    const int i = std::clamp(static_cast<int>(std::floor(a)), 0, N - 1);
    const int j = std::clamp(static_cast<int>(std::floor(b)), 0, rows - 1);
    const bool upper = (a - i) + (b - j) > 1.0;
    return 2 * (static_cast<std::size_t>(i) + static_cast<std::size_t>(N) * j) + (upper ? 1 : 0);
}

TriMesh build_torus_mesh(const HexLattice& lattice, int N)
{
    if (N < 1) throw GeometryError("torus mesh needs N >= 1");
    return build_structured(lattice, Topology::Torus, N, 0);
}

TriMesh build_cylinder_mesh(const HexLattice& lattice, int N, int L)
{
    if (N < 1 || L < 1) throw GeometryError("cylinder mesh needs N >= 1 and L >= 1");
    return build_structured(lattice, Topology::Cylinder, N, L);
}

std::vector<Inclusion> mesh_inclusions(const TriMesh& mesh, double r)
{
    const std::vector<Inclusion> cell = honeycomb_inclusions(mesh.lattice, r);
    // Distance from a disc center to the four edges of its cell.
    const double height1 = mesh.lattice.cellArea / mesh.lattice.v2.norm();
    const double height2 = mesh.lattice.cellArea / mesh.lattice.v1.norm();
    for (const Inclusion& inc : cell) {
        const Vec2 t = mesh.lattice.coordinates(inc.center);
        const double d = std::min({t[0] * height1, (1.0 - t[0]) * height1, t[1] * height2, (1.0 - t[1]) * height2});
        if (d <= r) throw GeometryError("inclusion intersects the cell boundary");
    }
    if (mesh.topology == Topology::Torus) return cell;
    std::vector<Inclusion> out;
    for (int m = -mesh.L; m < mesh.L; ++m)
        for (Inclusion inc : cell) {
            inc.center += static_cast<double>(m) * mesh.lattice.v2;
            out.push_back(inc);
        }
    return out;
}

MeshCut cut_mesh(const TriMesh& mesh, const std::vector<Inclusion>& inclusions, int mArc, CutPolicy policy)
{
    MeshCut cut;
    cut.mArc = mArc;
    cut.kinds.resize(mesh.num_elements());
    cut.cuts.resize(mesh.num_elements());
    InclusionIndex index(mesh, inclusions);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Triangle tri = mesh.triangle(e);
        const std::vector<int> ids = index.candidates(tri);
        const std::vector<Inclusion> cand = index.gather(ids);
        Classification c = classify_triangle(tri, cand, static_cast<long>(e), policy);
        if (c.inclusion >= 0) {
            const int local = c.inclusion;
            c.inclusion = ids[local];
            if (c.kind == ElementKind::Interface)
                cut.cuts[e] = cut_triangle(tri, cand[local], mArc, static_cast<long>(e), policy);
        }
        cut.kinds[e] = c;
    }
    return cut;
}

AssumptionReport assumption_check(const TriMesh& mesh, const std::vector<Inclusion>& inclusions)
{
    AssumptionReport report;
    InclusionIndex index(mesh, inclusions);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Triangle tri = mesh.triangle(e);
        try {
            classify_triangle(tri, index.gather(index.candidates(tri)), static_cast<long>(e));
        } catch (const AssumptionViolation& v) {
            report.violations.push_back({v.element(), v.what(), v.kind()});
        }
    }
    return report;
}

DofMap build_dofmap(const TriMesh& mesh, const MeshCut& cut)
{
    if (cut.kinds.size() != mesh.num_elements() || cut.cuts.size() != mesh.num_elements())
        throw GeometryError("classification does not match the mesh");
    const std::size_t nv = mesh.vertices.size();
    std::vector<char> on1(nv, 0), on2(nv, 0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const ElementKind kind = cut.kinds[e].kind;
        if (kind == ElementKind::Interface && !cut.cuts[e])
            throw GeometryError("element " + std::to_string(e) + " is marked Interface but has no cut geometry");
        for (int v : mesh.triangles[e]) {
            const int rep = mesh.periodicMap[v];
            if (kind != ElementKind::Outer) on1[rep] = 1;
            if (kind != ElementKind::Inner) on2[rep] = 1;
        }
    }

    std::vector<int> idx1(nv, -1), idx2(nv, -1);
    DofMap map;
    // The truncation lines lie in the outer material, so only side-2 values are
    // eliminated there; side-1 copies on those vertices stay free.
    for (std::size_t v = 0; v < nv; ++v) {
        if (mesh.periodicMap[v] != static_cast<int>(v)) continue;
        if (on1[v]) idx1[v] = map.size++;
        if (on2[v] && !mesh.dirichlet[v]) idx2[v] = map.size++;
        if (idx1[v] >= 0 && idx2[v] >= 0) ++map.doubled;
    }
    map.side1.resize(nv);
    map.side2.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        map.side1[v] = idx1[mesh.periodicMap[v]];
        map.side2[v] = mesh.dirichlet[v] ? -1 : idx2[mesh.periodicMap[v]];
    }
    return map;
}

void write_mesh(std::ostream& os, const TriMesh& mesh, const MeshCut* cut)
{
    const auto kind_name = [](ElementKind k) {
        switch (k) {
            case ElementKind::Inner: return "inner";
            case ElementKind::Outer: return "outer";
            case ElementKind::Interface: return "interface";
        }
        return "outer";
    };
    os << "# bloch-nitsche mesh v1\n";
    os << "topology " << (mesh.topology == Topology::Torus ? "torus" : "cylinder") << " N " << mesh.N << " L "
       << mesh.L << " h " << std::setprecision(17) << mesh.h << "\n";
    os << "vertices " << mesh.vertices.size() << "\n";
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        os << v << ' ' << mesh.vertices[v].x() << ' ' << mesh.vertices[v].y() << ' ' << mesh.periodicMap[v] << ' '
           << static_cast<int>(mesh.dirichlet[v]) << "\n";
    os << "triangles " << mesh.triangles.size() << "\n";
    for (std::size_t e = 0; e < mesh.triangles.size(); ++e) {
        const auto& t = mesh.triangles[e];
        os << e << ' ' << t[0] << ' ' << t[1] << ' ' << t[2];
        if (cut) os << ' ' << kind_name(cut->kinds[e].kind) << ' ' << cut->kinds[e].inclusion;
        os << "\n";
    }
}

}  // namespace bloch_nitsche
