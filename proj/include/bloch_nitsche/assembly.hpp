// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Unfitted Nitsche forms on the torus and the truncated cylinder.

#pragma once

#include <iosfwd>
#include <memory>
#include <utility>

#include "bloch_nitsche/material.hpp"
#include "bloch_nitsche/mesh.hpp"

namespace bloch_nitsche {

/// Mesh, inclusions, cut data and DOF map: everything about a discretization
/// that does not depend on the material or on the quasimomentum.
struct Discretization {
    TriMesh mesh;
    std::vector<Inclusion> inclusions;
    MeshCut cut;
    DofMap dofs;

    int size() const { return dofs.size; }
};

/// radius <= 0 builds a discretization without inclusions. Elements whose cap is
/// clipped through a single edge are cut unless the policy is Strict.
std::shared_ptr<const Discretization> discretize_torus(const HexLattice& lattice, int N, double radius,
                                                       int mArc = 4, CutPolicy policy = CutPolicy::AllowSameEdge);
std::shared_ptr<const Discretization> discretize_cylinder(const HexLattice& lattice, int N, int L, double radius,
                                                          int mArc = 4,
                                                          CutPolicy policy = CutPolicy::AllowSameEdge);

struct BlochParams {
    Vec2 k = Vec2::Zero();
    double kPar = 0.0;  // meaningful for the cylinder only

    static BlochParams torus(const Vec2& k) { return {k, 0.0}; }
    /// k = (kPar / 2 pi) k1.
    static BlochParams cylinder(double kPar, const HexLattice& lattice)
    {
        return {kPar / (2.0 * kPi) * lattice.k1, kPar};
    }
};

struct CutElementData {
    double kappa1 = 0.5, kappa2 = 0.5;
    double lambdaK = 0.0;
};

/// kappa1 = |W2| |K1| / (|W2| |K1| + |W1| |K2|), kappa2 = 1 - kappa1.
std::pair<double, double> kappa_weights(double area1, double area2, double normW1, double normW2);
/// lambda_K = h |W1| |W2| |Gamma_K| / (|W2| |K1| + |W1| |K2|).
double lambda_K(double h, double area1, double area2, double gammaLength, double normW1, double normW2);

struct NitscheSystem {
    SpMat A;  // stiffness plus interface consistency and penalty terms
    SpMat B;  // side-wise mass
    std::shared_ptr<const Discretization> disc;
    BlochParams bloch;
    double lambdaHat = 10.0;

    int size() const { return static_cast<int>(A.rows()); }
};

inline constexpr double kDefaultLambdaHat = 10.0;

/// Torus system at quasimomentum k. Throws Error on a cylinder discretization.
NitscheSystem assemble_bulk(std::shared_ptr<const Discretization> disc, const Material& material, const Vec2& k,
                            double lambdaHat = kDefaultLambdaHat);
/// Cylinder system at parallel quasimomentum kPar, Dirichlet DOFs removed.
NitscheSystem assemble_edge(std::shared_ptr<const Discretization> disc, const Material& material, double kPar,
                            double lambdaHat = kDefaultLambdaHat);

/// Matrix of the squared mesh-dependent norm: shifted-gradient seminorm over both
/// sides plus h^-1 times the squared interface jump.
SpMat energy_norm_matrix(const Discretization& disc, const Vec2& k);
double energy_norm(const VecXc& vec, const NitscheSystem& system);

/// Max entry modulus.
double max_abs(const SpMat& M);
/// Max |M - M^H|.
double hermitian_defect(const SpMat& M);

/// Coordinate dump: header "rows cols nnz" then "row col re im" per entry (0-based).
void write_matrix(std::ostream& os, const SpMat& M);

}  // namespace bloch_nitsche
