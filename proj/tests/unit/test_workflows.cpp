#include <algorithm>
#include <cstring>
#include <random>

#include "bloch_nitsche/workflows.hpp"
#include "doctest.h"

using namespace bloch_nitsche;

namespace {

// Cylinder vector equal to 1 on both sides of every vertex passing `keep`, 0 elsewhere.
template <class Pred>
VecXc indicator(const Discretization& disc, Pred keep)
{
    VecXc x = VecXc::Zero(disc.size());
    for (std::size_t v = 0; v < disc.mesh.vertices.size(); ++v) {
        const double t2 = disc.mesh.lattice.coordinates(disc.mesh.vertices[v]).y();
        if (!keep(t2)) continue;
        if (disc.dofs.side1[v] >= 0) x(disc.dofs.side1[v]) = 1.0;
        if (disc.dofs.side2[v] >= 0) x(disc.dofs.side2[v]) = 1.0;
    }
    return x;
}

}  // namespace

TEST_CASE("k paths")
{
    const HexLattice lat = HexLattice::honeycomb();
    const SymmetryPoints sp = high_symmetry_points(lat);
    const auto path = k_path(lat, 5);
    REQUIRE(path.size() == 16);
    CHECK(path[0].label == "G");
    CHECK(path[5].label == "K");
    CHECK(path[10].label == "M");
    CHECK(path[15].label == "G");
    CHECK((path[5].k - sp.k).norm() < 1e-14);
    CHECK((path[10].k - sp.m).norm() < 1e-14);
    for (std::size_t i = 1; i < path.size(); ++i) {
        CHECK(path[i].s > path[i - 1].s);
        CHECK(path[i].s - path[i - 1].s == doctest::Approx((path[i].k - path[i - 1].k).norm()).epsilon(1e-12));
    }

    const auto cell = dual_cell_boundary_path(lat, 4);
    CHECK(cell.size() == 17);
    CHECK((cell.front().k - cell.back().k).norm() < 1e-12);

    const auto kp = kpar_samples(5);
    REQUIRE(kp.size() == 5);
    CHECK(kp[0].kPar == 0.0);
    CHECK(kp[4].kPar == doctest::Approx(2 * kPi));
    CHECK(kp[2].s == doctest::Approx(kPi));
}

TEST_CASE("free spectrum")
{
    const HexLattice lat = HexLattice::honeycomb();
    const auto f = free_spectrum(lat, high_symmetry_points(lat).k, 6);
    REQUIRE(f.size() == 6);
    for (int i = 0; i < 3; ++i) CHECK(f[i] == doctest::Approx(16 * kPi * kPi / 9).epsilon(1e-13));
    CHECK(f[3] > f[2] * 1.5);
    CHECK(std::is_sorted(f.begin(), f.end()));
}

TEST_CASE("homogeneous band sweep follows the free spectrum")
{
    const HexLattice lat = HexLattice::honeycomb();
    const MaterialParams p = MaterialParams::contrast(0.0);
    const auto path = k_path(lat, 3);
    SweepOptions opt;
    opt.threads = 2;
    const BandStructure bs = bulk_band_sweep(p, 32, path, 4, opt);
    CHECK(bs.kind == "bulk");
    CHECK(bs.bands.rows() == long(path.size()));
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto f = free_spectrum(lat, path[i].k, 4);
        for (int m = 0; m < 4; ++m) {
            if (m > 0) CHECK(bs.bands(i, m) >= bs.bands(i, m - 1));
            CHECK(std::abs(bs.bands(i, m) - f[m]) <= 0.03 * std::max(f[m], 1.0));
        }
    }
}

TEST_CASE("band symmetry and sweep determinism")
{
    const MaterialParams p = MaterialParams::contrast(2.0);
    std::vector<KSample> ks;
    for (Vec2 k : {Vec2(0.3, 1.1), Vec2(-2.0, 0.4), Vec2(1.7, 2.9)}) {
        ks.push_back(KSample{k, 0.0, 0.0, ""});
        ks.push_back(KSample{-k, 0.0, 0.0, ""});
    }
    SweepOptions opt;
    opt.threads = 3;
    const BandStructure a = bulk_band_sweep(p, 8, ks, 5, opt), b = bulk_band_sweep(p, 8, ks, 5, opt);
    CHECK(std::memcmp(a.bands.data(), b.bands.data(), sizeof(double) * a.bands.size()) == 0);
    for (int i = 0; i < 6; i += 2)
        for (int m = 0; m < 5; ++m) CHECK(std::abs(a.bands(i, m) - a.bands(i + 1, m)) <= 1e-10 * a.bands(i, m));
    opt.threads = 1;
    const BandStructure c = bulk_band_sweep(p, 8, ks, 5, opt);
    CHECK(std::memcmp(a.bands.data(), c.bands.data(), sizeof(double) * a.bands.size()) == 0);
}

TEST_CASE("refinement lowers homogeneous bands")
{
    const HexLattice lat = HexLattice::honeycomb();
    const std::vector<KSample> ks{{Vec2(0.9, 1.3), 0.0, 0.0, ""}, {high_symmetry_points(lat).m, 0.0, 0.0, ""}};
    const BandStructure c = bulk_band_sweep(MaterialParams{}, 8, ks, 4), f = bulk_band_sweep(MaterialParams{}, 16, ks, 4);
    for (int i = 0; i < 2; ++i)
        for (int m = 0; m < 4; ++m) CHECK(f.bands(i, m) <= c.bands(i, m) + 1e-8);
}

TEST_CASE("continuous spectrum envelopes")
{
    const HexLattice lat = HexLattice::honeycomb();
    const double kPar = 2 * kPi / 3;

    SUBCASE("homogeneous projection")
    {
        const int S = 9;
        const auto env = continuous_spectrum_envelope(MaterialParams{}, kPar, 32, 4, S);
        REQUIRE(env.size() == 4);
        for (int b = 0; b < 4; ++b) {
            double lo = 1e300, hi = -1e300;
            for (int i = 0; i < S; ++i) {
                const double lambda = -0.5 + double(i) / (S - 1);
                const auto f = free_spectrum(lat, lambda * lat.k2 + kPar / (2 * kPi) * lat.k1, 4);
                lo = std::min(lo, f[b]);
                hi = std::max(hi, f[b]);
            }
            CHECK(env[b].lo == doctest::Approx(lo).epsilon(0.03));
            CHECK(env[b].hi == doctest::Approx(hi).epsilon(0.03));
        }
    }

    SUBCASE("asymptotes with opposite Faraday terms")
    {
        MaterialParams plus = MaterialParams::contrast(2.0, 0.3), minus = MaterialParams::contrast(2.0, -0.3);
        const auto a = continuous_spectrum_envelope(plus, kPar, 8, 4, 7);
        const auto b = continuous_spectrum_envelope(minus, kPar, 8, 4, 7);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(a[i].lo - b[i].lo) <= 1e-8 * a[i].lo);
            CHECK(std::abs(a[i].hi - b[i].hi) <= 1e-8 * a[i].hi);
        }
        MaterialParams edge = MaterialParams::contrast(2.0);
        edge.delta = 0.3;
        const auto e = edge_envelope(edge, kPar, 8, 4, 7);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(e[i].lo - a[i].lo) <= 1e-8 * a[i].lo);
            CHECK(std::abs(e[i].hi - a[i].hi) <= 1e-8 * a[i].hi);
        }
    }

    SUBCASE("more samples widen the intervals")
    {
        const MaterialParams p = MaterialParams::contrast(2.0, 0.2);
        const auto coarse = continuous_spectrum_envelope(p, kPar, 8, 4, 5);
        const auto fine = continuous_spectrum_envelope(p, kPar, 8, 4, 9);
        for (int i = 0; i < 4; ++i) {
            CHECK(fine[i].lo <= coarse[i].lo + 1e-12 * coarse[i].lo);
            CHECK(fine[i].hi >= coarse[i].hi - 1e-12 * coarse[i].hi);
        }
    }
}

TEST_CASE("first gap")
{
    CHECK_FALSE(first_gap({{1, 3}, {2, 4}}).has_value());
    const auto g = first_gap({{1, 3}, {2, 4}, {5, 6}});
    REQUIRE(g.has_value());
    CHECK(g->lo == 4);
    CHECK(g->hi == 5);
}

TEST_CASE("localization and classification")
{
    const HexLattice lat = HexLattice::honeycomb();
    const int L = 8;
    const auto disc = discretize_cylinder(lat, 8, L, 0.2);
    const double cBand = L / 8.0;

    const Localization c = localization(*disc, indicator(*disc, [&](double t) { return std::abs(t) <= cBand - 0.5; }), cBand);
    CHECK(c.center == doctest::Approx(1.0));
    CHECK(classify_mode(c) == ModeTag::Edge);

    const Localization e = localization(*disc, indicator(*disc, [&](double t) { return t >= L - cBand + 0.5 && t < L; }), cBand);
    CHECK(e.boundary == doctest::Approx(1.0));
    CHECK(classify_mode(e) == ModeTag::PseudoEdge);

    const Localization u = localization(*disc, indicator(*disc, [](double) { return true; }), cBand);
    CHECK(u.center == doctest::Approx(cBand / L).epsilon(0.05));
    CHECK(classify_mode(u) == ModeTag::Bulk);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
        VecXc x(disc->size());
        for (auto& v : x) v = cplx(g(rng), g(rng));
        const Localization l = localization(*disc, x, cBand);
        CHECK(std::abs(l.center + l.boundary + l.middle - 1.0) <= 1e-12);
        for (double f : {l.center, l.boundary, l.middle}) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
    }

    CHECK(classify_mode(Localization{0.6, 0.0, 0.4}) == ModeTag::Edge);
    CHECK(classify_mode(Localization{0.59, 0.0, 0.41}) == ModeTag::Bulk);
    CHECK(classify_mode(Localization{0.0, 0.6, 0.4}) == ModeTag::PseudoEdge);
    CHECK(std::string(to_string(ModeTag::PseudoEdge)) == "pseudo-edge");
}

TEST_CASE("edge sweep without a wall has no edge modes")
{
    MaterialParams p = MaterialParams::contrast(2.0);
    p.delta = 0.0;
    EdgeSweepOptions opt;
    opt.threads = 3;
    const EdgeSweep s = edge_band_sweep(p, 8, 4, kpar_samples(3), 16, opt);
    CHECK(s.bands.kind == "edge");
    REQUIRE(s.modes.size() == 3);
    for (const auto& modes : s.modes) {
        CHECK(modes.size() == 16);
        for (const ModeField& m : modes) {
            CHECK(m.tag != ModeTag::Edge);
            CHECK(std::abs(m.center + m.boundary + m.middle - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("convergence tables")
{
    const std::vector<int> N{8, 16, 32, 64};
    std::vector<double> h;
    for (int n : N) h.push_back(1.0 / n);
    Eigen::MatrixXd E(4, 2);
    for (int i = 0; i < 4; ++i) {
        E(i, 0) = 5.0 + 3.0 * h[i] * h[i];
        E(i, 1) = 9.0 + 0.5 * h[i];
    }
    const ConvergenceTable t = convergence_table(N, h, E);
    CHECK(t.errors.rows() == 3);
    CHECK(t.slopes(0) == doctest::Approx(2.0).epsilon(0.01));
    CHECK(t.slopes(1) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(fit_slope({1.0, 0.5, 0.25}, {2.0, 0.5, 0.125}) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS(convergence_table({8, 16}, {0.125, 0.0625}, E.topRows(2)));
    CHECK_THROWS(convergence_table({16, 8, 32}, {0.0625, 0.125, 1.0 / 32}, E.topRows(3)));
}

TEST_CASE("assumption enforcement and nev estimate")
{
    const HexLattice lat = HexLattice::honeycomb();
    CHECK_THROWS_AS(require_assumption(build_torus_mesh(lat, 1), 0.2, false), AssumptionViolation);
    CHECK_NOTHROW(require_assumption(build_torus_mesh(lat, 16), 0.2, false));
    CHECK_THROWS_AS(require_assumption(build_torus_mesh(lat, 16), 0.2, true), AssumptionViolation);
    CHECK(edge_nev_estimate(20, 2) > edge_nev_estimate(10, 2));
    CHECK(edge_nev_estimate(10, 2) > 5);
}
