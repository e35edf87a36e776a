// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Uniform triangulations of the torus cell and the truncated cylinder, their
// cut classification against the inclusions, and the doubled-DOF map.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bloch_nitsche/geometry.hpp"

namespace bloch_nitsche {

enum class Topology { Torus, Cylinder };

/// Structured mesh over {t1 v1 + t2 v2}. Vertex (i, j) sits at t = (i/N, tMin + j/N)
/// with 0 <= i <= N and 0 <= j <= rows; each sub-rhombus is split along the
/// diagonal from (i, j+1) to (i+1, j).
struct TriMesh {
    Topology topology = Topology::Torus;
    HexLattice lattice;
    int N = 0;
    int L = 0;          // cylinder half-length in cells, 0 for the torus
    int rows = 0;       // sub-rhombus rows along v2 (N or 2LN)
    double tMin = 0.0;  // t2 of the first vertex row (0 or -L)
    double h = 0.0;     // |v1| / N
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> periodicMap;  // vertex -> representative vertex
    std::vector<char> dirichlet;   // vertex on t2 = +-L (cylinder only)
    int numClasses = 0;            // distinct representatives

    int vertex_index(int i, int j) const { return i + (N + 1) * j; }
    Triangle triangle(std::size_t e) const
    {
        const auto& t = triangles[e];
        return Triangle{{vertices[t[0]], vertices[t[1]], vertices[t[2]]}};
    }
    std::size_t num_elements() const { return triangles.size(); }
    /// Element containing lattice coordinates t (clamped to the mesh).
    std::size_t locate(const Vec2& t) const;
};

/// N x N sub-rhombuses of the fundamental cell, periodic in both directions.
TriMesh build_torus_mesh(const HexLattice& lattice, int N);
/// N x 2LN sub-rhombuses of {0 <= t1 <= 1, -L <= t2 <= L}, periodic in v1.
TriMesh build_cylinder_mesh(const HexLattice& lattice, int N, int L);

/// Honeycomb discs of radius r in every cell covered by the mesh. Throws
/// GeometryError if a disc touches its cell boundary.
std::vector<Inclusion> mesh_inclusions(const TriMesh& mesh, double r);

struct MeshCut {
    std::vector<Classification> kinds;
    std::vector<std::optional<CutGeometry>> cuts;  // engaged exactly for Interface elements
    int mArc = 4;
};

struct AssumptionReport {
    struct Entry {
        long element;
        std::string reason;
        ViolationKind kind = ViolationKind::CrossingCount;
    };
    std::vector<Entry> violations;
    bool ok() const { return violations.empty(); }
    /// Every violation is a same-edge crossing pair, so the mesh can still be cut.
    bool cuttable() const
    {
        for (const Entry& e : violations)
            if (e.kind != ViolationKind::SameEdge) return false;
        return true;
    }
};

/// Classify and cut every element. Throws AssumptionViolation on the first element
/// the policy rejects.
MeshCut cut_mesh(const TriMesh& mesh, const std::vector<Inclusion>& inclusions, int mArc,
                 CutPolicy policy = CutPolicy::Strict);
/// Collect every interface element that violates the two-crossing requirement.
AssumptionReport assumption_check(const TriMesh& mesh, const std::vector<Inclusion>& inclusions);

/// DOFs of the direct-sum space: side s of vertex v has index side[s-1][v] or -1.
struct DofMap {
    std::vector<int> side1, side2;
    int size = 0;
    int doubled = 0;  // vertex classes carrying two DOFs

    int dof(Side s, int vertex) const { return s == Side::Inner ? side1[vertex] : side2[vertex]; }
};

/// Side-s DOFs live on vertices of elements touching Omega_s; identified vertices
/// share indices and Dirichlet vertices carry no side-2 DOF. Indices run over representative
/// classes in vertex order, side 1 before side 2.
DofMap build_dofmap(const TriMesh& mesh, const MeshCut& cut);

/// Plain-text dump: header, vertex lines, triangle lines with classification.
void write_mesh(std::ostream& os, const TriMesh& mesh, const MeshCut* cut = nullptr);

}  // namespace bloch_nitsche
