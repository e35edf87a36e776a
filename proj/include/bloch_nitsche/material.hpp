// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Piecewise-constant permittivity and the 2x2 Hermitian material weights.

#pragma once

#include <span>
#include <utility>

#include "bloch_nitsche/geometry.hpp"

namespace bloch_nitsche {

enum class WallKind { Step, Tanh };
enum class WeightForm { ExactInverse, FirstOrder };
/// Bulk: constant Faraday term, Lambda-periodic. Edge: domain wall along the zigzag direction.
enum class MaterialLayout { Bulk, Edge };

struct MaterialParams {
    double epsA = 1.0, epsB = 1.0, eps0 = 1.0;
    double gamma = 0.0;     // bulk Faraday rotation
    double delta = 0.0;     // wall strength
    double kappaInf = 1.0;  // wall asymptote
    double radius = 0.2;
    WallKind wall = WallKind::Step;
    WeightForm form = WeightForm::FirstOrder;

    /// epsA = epsB = 1 + J inside the discs, eps0 = 1 outside.
    static MaterialParams contrast(double J, double gamma = 0.0);

    /// Throws MaterialError unless every attainable weight is positive definite.
    void validate(MaterialLayout layout) const;
};

struct WeightSample {
    Mat2c W;
    Side side = Side::Outer;
};

/// Pauli matrix [[0, -i], [i, 0]].
Mat2c sigma2();

/// exact inverse of [[eps, i g], [-i g, eps]], or eps^-1 I + g eps^-2 sigma2.
Mat2c weight_matrix(double eps, double g, WeightForm form);

/// Step: -kInf / 0 / +kInf by the sign of zeta. Tanh: kInf tanh(zeta).
double domain_wall(double zeta, WallKind kind, double kappaInf);

/// Permittivity at x; `cellInclusions` are the discs of the fundamental cell.
double epsilon_at(const Vec2& x, const MaterialParams& p, const HexLattice& lattice,
                  std::span<const Inclusion> cellInclusions);
WeightSample weight_bulk(const Vec2& x, const MaterialParams& p, const HexLattice& lattice,
                         std::span<const Inclusion> cellInclusions);
WeightSample weight_edge(const Vec2& x, const MaterialParams& p, const HexLattice& lattice,
                         std::span<const Inclusion> cellInclusions);

/// Max row-sum norms of W over the inclusion side and the background side.
std::pair<double, double> side_norms(const MaterialParams& p, MaterialLayout layout);

/// Side-aware evaluator used by the assemblers: quadrature points on a cut
/// element need the weight of a prescribed side regardless of where they land.
class Material {
public:
    Material(const MaterialParams& params, MaterialLayout layout, const HexLattice& lattice);

    double epsilon(Side side, Site site) const;
    /// Effective Faraday coefficient at x (constant for bulk, wall profile for edge).
    double faraday(const Vec2& x) const;
    Mat2c weight(const Vec2& x, Side side, Site site) const;
    std::pair<double, double> norms() const { return norms_; }

    const MaterialParams& params() const { return params_; }
    MaterialLayout layout() const { return layout_; }
    const HexLattice& lattice() const { return lattice_; }

    /// Bulk material equal to the edge material far on the +/- side of the wall.
    Material asymptote(int sign) const;

private:
    MaterialParams params_;
    MaterialLayout layout_;
    HexLattice lattice_;
    std::pair<double, double> norms_;
};

}  // namespace bloch_nitsche
