// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Plane-wave baseline for the torus eigenproblem.

#pragma once

#include <functional>
#include <vector>

#include "bloch_nitsche/eigensolve.hpp"
#include "bloch_nitsche/material.hpp"

namespace bloch_nitsche {

struct PlaneWaveBasis {
    int M = 0;
    std::vector<std::array<int, 2>> indices;  // (m1, m2), |m_i| <= M/2
    std::vector<Vec2> G;                      // m1 k1 + m2 k2

    /// Throws Error unless M is even and >= 2.
    static PlaneWaveBasis build(const HexLattice& lattice, int M);
    std::size_t size() const { return G.size(); }
};

/// Coefficients W^(m1 k1 + m2 k2) for |m_i| <= range.
struct FourierTable {
    int range = 0;
    int gridSize = 0;
    std::vector<Mat2c> data;

    const Mat2c& at(int m1, int m2) const;
};

/// Discrete transform of W sampled on a gridSize^2 lattice of the cell, normalized
/// by the cell area. `range` is the largest |m_i| kept.
FourierTable fourier_coefficients_W(const Material& material, int gridSize, int range);

/// Same transform for an arbitrary cell-periodic field given on lattice coordinates.
FourierTable fourier_coefficients(const std::function<Mat2c(const Vec2& t)>& field, int gridSize, int range);

/// Hermitian matrix (k + G)^T W^(G - G') (k + G').
MatXc plane_wave_matrix(const PlaneWaveBasis& basis, const FourierTable& table, const Vec2& k);

/// Smallest nev eigenvalues of the plane-wave operator at k. gridSize 0 picks
/// the smallest power of two >= max(64, 8 M).
EigenResult spectral_bands(const Material& material, const Vec2& k, int M, int nev, int gridSize = 0);

/// Caches the transform for sweeps over k.
class SpectralModel {
public:
    SpectralModel(const Material& material, int M, int gridSize = 0);
    EigenResult bands(const Vec2& k, int nev) const;
    const PlaneWaveBasis& basis() const { return basis_; }
    const FourierTable& table() const { return table_; }

private:
    PlaneWaveBasis basis_;
    FourierTable table_;
};

}  // namespace bloch_nitsche
