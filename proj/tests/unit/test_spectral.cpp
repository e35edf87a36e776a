#include <algorithm>
#include <set>

#include "bloch_nitsche/spectral.hpp"
#include "bloch_nitsche/workflows.hpp"
#include "doctest.h"

using namespace bloch_nitsche;

namespace {

// J_1 by its power series; converges fast for the small arguments used here.
double bessel_j1(double x)
{
    double term = x / 2, sum = term;
    for (int m = 1; m < 60; ++m) {
        term *= -(x * x / 4) / (m * (m + 1.0));
        sum += term;
    }
    return sum;
}

}  // namespace

TEST_CASE("plane-wave basis")
{
    const HexLattice lat = HexLattice::honeycomb();
    for (int M : {2, 4, 16}) {
        const PlaneWaveBasis b = PlaneWaveBasis::build(lat, M);
        CHECK(b.size() == std::size_t((M + 1) * (M + 1)));
        std::set<std::array<int, 2>> idx(b.indices.begin(), b.indices.end());
        for (const auto& m : b.indices) {
            CHECK(idx.count({-m[0], -m[1]}) == 1);
            CHECK(std::abs(m[0]) <= M / 2);
            CHECK(std::abs(m[1]) <= M / 2);
        }
    }
    CHECK_THROWS(PlaneWaveBasis::build(lat, 3));
    CHECK_THROWS(PlaneWaveBasis::build(lat, 0));
}

TEST_CASE("Fourier coefficients of a homogeneous weight")
{
    const HexLattice lat = HexLattice::honeycomb();
    const Material mat(MaterialParams{}, MaterialLayout::Bulk, lat);
    const FourierTable t = fourier_coefficients_W(mat, 64, 4);
    for (int m1 = -4; m1 <= 4; ++m1)
        for (int m2 = -4; m2 <= 4; ++m2) {
            const Mat2c expect = (m1 == 0 && m2 == 0) ? Mat2c(Mat2c::Identity()) : Mat2c(Mat2c::Zero());
            CHECK((t.at(m1, m2) - expect).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("Fourier coefficients are conjugate symmetric")
{
    const HexLattice lat = HexLattice::honeycomb();
    const Material mat(MaterialParams::contrast(2.0, 0.1), MaterialLayout::Bulk, lat);
    const FourierTable t = fourier_coefficients_W(mat, 128, 6);
    for (int m1 = -6; m1 <= 6; ++m1)
        for (int m2 = -6; m2 <= 6; ++m2) CHECK((t.at(-m1, -m2) - t.at(m1, m2).adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("disc indicator against the Bessel oracle")
{
    const HexLattice lat = HexLattice::honeycomb();
    const double r = 0.2;
    const Vec2 A = lat.site_a();
    const auto disc = [&](const Vec2& t) -> Mat2c {
        const Vec2 x = wrap_to_cell(lat.point(t.x(), t.y()), lat).x;
        return (x - A).norm() < r ? Mat2c(Mat2c::Identity()) : Mat2c(Mat2c::Zero());
    };
    const FourierTable t = fourier_coefficients(disc, 1024, 2);
    // Mean value: a lattice-point count of the disc, whose error decays more slowly.
    CHECK(std::abs(t.at(0, 0)(0, 0).real() - kPi * r * r / lat.cellArea) < 1e-5);
    for (auto [m1, m2] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}, std::pair{2, -1}}) {
        const double g = (m1 * lat.k1 + m2 * lat.k2).norm();
        const double exact = 2 * kPi * r * bessel_j1(g * r) / (lat.cellArea * g);
        CHECK(std::abs(std::abs(t.at(m1, m2)(0, 0)) - std::abs(exact)) < 1e-6);
    }
}

TEST_CASE("homogeneous spectral bands are the free spectrum")
{
    const HexLattice lat = HexLattice::honeycomb();
    const Material mat(MaterialParams{}, MaterialLayout::Bulk, lat);
    const Vec2 k = high_symmetry_points(lat).k + Vec2(0.3, -0.1);
    const std::vector<double> free = free_spectrum(lat, k, 6);
    for (int M : {2, 4, 8}) {
        const EigenResult r = spectral_bands(mat, k, M, 6);
        // The basis only reaches |m_i| <= M / 2; compare the values it contains.
        const PlaneWaveBasis b = PlaneWaveBasis::build(lat, M);
        std::vector<double> inBasis;
        for (const Vec2& G : b.G) inBasis.push_back((k + G).squaredNorm());
        std::sort(inBasis.begin(), inBasis.end());
        for (int i = 0; i < 6; ++i) CHECK(r.eigenvalues(i) == doctest::Approx(inBasis[i]).epsilon(1e-12));
        if (M >= 4)
            for (int i = 0; i < 6; ++i) CHECK(r.eigenvalues(i) == doctest::Approx(free[i]).epsilon(1e-12));
    }
}

TEST_CASE("plane-wave matrix is Hermitian and bands are symmetric")
{
    const HexLattice lat = HexLattice::honeycomb();
    const Material mat(MaterialParams::contrast(2.0), MaterialLayout::Bulk, lat);
    const SpectralModel model(mat, 8);
    const Vec2 k(0.9, 1.7);
    const MatXc H = plane_wave_matrix(model.basis(), model.table(), k);
    CHECK((H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * H.cwiseAbs().maxCoeff());
    const EigenResult p = model.bands(k, 6), m = model.bands(-k, 6);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(p.eigenvalues(i) - m.eigenvalues(i)) <= 1e-10 * p.eigenvalues(i));
    const EigenResult direct = spectral_bands(mat, k, 8, 6);
    CHECK((direct.eigenvalues - p.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectral eigenvalues decrease with M on a fixed grid")
{
    const HexLattice lat = HexLattice::honeycomb();
    const Material mat(MaterialParams::contrast(2.0, 0.1), MaterialLayout::Bulk, lat);
    const Vec2 k = high_symmetry_points(lat).k;
    Eigen::VectorXd prev;
    for (int M : {4, 8, 12, 16}) {
        const EigenResult r = SpectralModel(mat, M, 256).bands(k, 4);
        if (prev.size())
            for (int i = 0; i < 4; ++i) CHECK(r.eigenvalues(i) <= prev(i) + 1e-8);
        prev = r.eigenvalues;
    }
}
