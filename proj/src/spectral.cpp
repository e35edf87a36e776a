// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/spectral.hpp"

#include <cmath>
#include <functional>

namespace bloch_nitsche {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int default_grid(int M)
{
    int g = 64;
    while (g < 8 * M) g *= 2;
    return g;
}

}  // namespace

PlaneWaveBasis PlaneWaveBasis::build(const HexLattice& lattice, int M)
{
    if (M < 2 || M % 2 != 0) throw Error("plane-wave truncation M must be even and >= 2, got " + std::to_string(M));
    PlaneWaveBasis b;
    b.M = M;
    const int h = M / 2;
    for (int m1 = -h; m1 <= h; ++m1)
        for (int m2 = -h; m2 <= h; ++m2) {
            b.indices.push_back({m1, m2});
            b.G.push_back(m1 * lattice.k1 + m2 * lattice.k2);
        }
    return b;
}

const Mat2c& FourierTable::at(int m1, int m2) const
{
    if (std::abs(m1) > range || std::abs(m2) > range) throw Error("Fourier index outside the table");
    const int w = 2 * range + 1;
    return data[(m1 + range) * w + (m2 + range)];
}

FourierTable fourier_coefficients(const std::function<Mat2c(const Vec2& t)>& field, int gridSize, int range)
{
    if (!power_of_two(gridSize) || gridSize < 4) throw Error("gridSize must be a power of two >= 4");
    if (range < 0 || 2 * range >= gridSize) throw Error("Fourier range too large for the grid");
    const int g = gridSize;
    const int w = 2 * range + 1;

    // e^{-2 pi i m a / g} for m in [-range, range], a in [0, g)
    std::vector<cplx> phase(static_cast<std::size_t>(w) * g);
    for (int m = -range; m <= range; ++m)
        for (int a = 0; a < g; ++a) {
            const long r = (static_cast<long>(m) * a) % g;
            const double ang = -2.0 * kPi * static_cast<double>(r) / g;
            phase[static_cast<std::size_t>(m + range) * g + a] = cplx(std::cos(ang), std::sin(ang));
        }

    // Partial sums over the first coordinate: P[m1][b] = sum_a W(a, b) e^{-2 pi i m1 a / g}.
    std::vector<Mat2c> partial(static_cast<std::size_t>(w) * g, Mat2c::Zero());
    std::vector<Mat2c> column(g);
    for (int b = 0; b < g; ++b) {
        for (int a = 0; a < g; ++a) column[a] = field(Vec2(static_cast<double>(a) / g, static_cast<double>(b) / g));
        for (int m1 = 0; m1 < w; ++m1) {
            Mat2c s = Mat2c::Zero();
            const cplx* ph = &phase[static_cast<std::size_t>(m1) * g];
            for (int a = 0; a < g; ++a) s += ph[a] * column[a];
            partial[static_cast<std::size_t>(m1) * g + b] = s;
        }
    }

    FourierTable t;
    t.range = range;
    t.gridSize = g;
    t.data.assign(static_cast<std::size_t>(w) * w, Mat2c::Zero());
    const double scale = 1.0 / (static_cast<double>(g) * g);
    for (int m1 = 0; m1 < w; ++m1)
        for (int m2 = 0; m2 < w; ++m2) {
            Mat2c s = Mat2c::Zero();
            const cplx* ph = &phase[static_cast<std::size_t>(m2) * g];
            const Mat2c* col = &partial[static_cast<std::size_t>(m1) * g];
            for (int b = 0; b < g; ++b) s += ph[b] * col[b];
            t.data[static_cast<std::size_t>(m1) * w + m2] = s * scale;
        }
    return t;
}

FourierTable fourier_coefficients_W(const Material& material, int gridSize, int range)
{
    if (material.layout() != MaterialLayout::Bulk) throw Error("plane-wave transform needs a bulk material");
    const HexLattice& lat = material.lattice();
    const std::vector<Inclusion> cell = honeycomb_inclusions(lat, material.params().radius);
    return fourier_coefficients(
        [&](const Vec2& t) { return weight_bulk(lat.point(t[0], t[1]), material.params(), lat, cell).W; }, gridSize,
        range);
}

MatXc plane_wave_matrix(const PlaneWaveBasis& basis, const FourierTable& table, const Vec2& k)
{
    const std::size_t n = basis.size();
    MatXc H(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2cd qi = (k + basis.G[i]).cast<cplx>();
        for (std::size_t j = 0; j < n; ++j) {
            const Eigen::Vector2cd qj = (k + basis.G[j]).cast<cplx>();
            const Mat2c& Wh = table.at(basis.indices[i][0] - basis.indices[j][0],
                                       basis.indices[i][1] - basis.indices[j][1]);
            H(i, j) = qi.transpose() * Wh * qj;
        }
    }
    return 0.5 * (H + MatXc(H.adjoint()));
}

SpectralModel::SpectralModel(const Material& material, int M, int gridSize)
    : basis_(PlaneWaveBasis::build(material.lattice(), M))
{
    const int g = gridSize > 0 ? gridSize : default_grid(M);
    if (g < 4 * M) throw Error("gridSize must be at least 4 M");
    table_ = fourier_coefficients_W(material, g, M);
}

EigenResult SpectralModel::bands(const Vec2& k, int nev) const
{
    const MatXc H = plane_wave_matrix(basis_, table_, k);
    const Eigen::Index n = H.rows();
    if (nev < 1 || nev > n) throw Error("spectral_bands: nev outside [1, basis size]");
    EigenResult full = solve_dense(H, MatXc::Identity(n, n));
    EigenResult out;
    out.eigenvalues = full.eigenvalues.head(nev);
    out.eigenvectors = full.eigenvectors.leftCols(nev);
    out.residuals = full.residuals.head(nev);
    return out;
}

EigenResult spectral_bands(const Material& material, const Vec2& k, int M, int nev, int gridSize)
{
    return SpectralModel(material, M, gridSize).bands(k, nev);
}

}  // namespace bloch_nitsche
