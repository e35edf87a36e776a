// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bloch_nitsche/parallel.hpp"

namespace bloch_nitsche {

namespace {

std::vector<KSample> polyline_path(const std::vector<Vec2>& corners, const std::vector<std::string>& labels, int S)
{
    if (S < 1) throw Error("path needs at least one sample per leg");
    std::vector<KSample> out;
    double s = 0.0;
    for (std::size_t leg = 0; leg + 1 < corners.size(); ++leg) {
        const Vec2 a = corners[leg], b = corners[leg + 1];
        for (int i = 0; i < S; ++i) {
            const double t = static_cast<double>(i) / S;
            KSample ks;
            ks.k = a + t * (b - a);
            ks.s = s + t * (b - a).norm();
            if (i == 0) ks.label = labels[leg];
            out.push_back(ks);
        }
        s += (b - a).norm();
    }
    KSample last;
    last.k = corners.back();
    last.s = s;
    last.label = labels.back();
    out.push_back(last);
    return out;
}

Eigen::RowVectorXd solve_row(const SpMat& A, const SpMat& B, int nev, const EigenOptions& opt)
{
    const EigenResult r = solve_smallest(A, B, nev, opt);
    return r.eigenvalues.transpose();
}

}  // namespace

std::vector<KSample> k_path(const HexLattice& lattice, int S)
{
    const SymmetryPoints p = high_symmetry_points(lattice);
    return polyline_path({p.gamma, p.k, p.m, p.gamma}, {"G", "K", "M", "G"}, S);
}

std::vector<KSample> dual_cell_boundary_path(const HexLattice& lattice, int S)
{
    const auto at = [&](double a, double b) -> Vec2 { return a * lattice.k1 + b * lattice.k2; };
    return polyline_path({at(-0.5, -0.5), at(0.5, -0.5), at(0.5, 0.5), at(-0.5, 0.5), at(-0.5, -0.5)},
                         {"C", "C", "C", "C", "C"}, S);
}

std::vector<KSample> kpar_samples(int S)
{
    if (S < 2) throw Error("kPar sweep needs at least two samples");
    std::vector<KSample> out(S);
    for (int i = 0; i < S; ++i) {
        out[i].kPar = 2.0 * kPi * i / (S - 1);
        out[i].s = out[i].kPar;
    }
    return out;
}

const char* to_string(ModeTag tag)
{
    switch (tag) {
        case ModeTag::Edge: return "edge";
        case ModeTag::PseudoEdge: return "pseudo-edge";
        case ModeTag::Bulk: return "bulk";
    }
    return "bulk";
}

Localization localization(const Discretization& disc, const VecXc& x, double cBand)
{
    const TriMesh& mesh = disc.mesh;
    if (x.size() != disc.size()) throw Error("mode vector does not match the discretization");
    const double L = mesh.L;
    double center = 0.0, boundary = 0.0, middle = 0.0;

    const auto accumulate = [&](const Triangle& tri, const std::vector<QuadPoint>& pts, const std::array<int, 3>& dof) {
        for (const QuadPoint& qp : pts) {
            const Eigen::Vector3d lam = tri.barycentric(qp.x);
            cplx u = 0.0;
            for (int j = 0; j < 3; ++j)
                if (dof[j] >= 0) u += x[dof[j]] * lam[j];
            const double m = qp.w * std::norm(u);
            const double t2 = std::abs(mesh.lattice.coordinates(qp.x)[1]);
            if (t2 <= cBand)
                center += m;
            else if (t2 >= L - cBand)
                boundary += m;
            else
                middle += m;
        }
    };

    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Triangle tri = mesh.triangle(e);
        std::array<int, 3> d1{}, d2{};
        for (int j = 0; j < 3; ++j) {
            d1[j] = disc.dofs.side1[mesh.triangles[e][j]];
            d2[j] = disc.dofs.side2[mesh.triangles[e][j]];
        }
        const Classification& cls = disc.cut.kinds[e];
        if (cls.kind == ElementKind::Interface) {
            const CutQuadrature q = subcell_quadrature(*disc.cut.cuts[e], 2);
            accumulate(tri, q.side1, d1);
            accumulate(tri, q.side2, d2);
        } else {
            accumulate(tri, triangle_quadrature(tri, 2), cls.kind == ElementKind::Inner ? d1 : d2);
        }
    }
    const double total = center + boundary + middle;
    if (!(total > 0.0)) throw Error("mode vector has zero mass");
    return {center / total, boundary / total, middle / total};
}

ModeTag classify_mode(const Localization& loc, const ModeThresholds& thresholds)
{
    if (loc.center >= thresholds.center) return ModeTag::Edge;
    if (loc.boundary >= thresholds.boundary) return ModeTag::PseudoEdge;
    return ModeTag::Bulk;
}

void require_assumption(const TriMesh& mesh, double radius, bool strict)
{
    if (radius <= 0.0) return;
    const AssumptionReport report = assumption_check(mesh, mesh_inclusions(mesh, radius));
    for (const auto& v : report.violations)
        if (strict || v.kind != ViolationKind::SameEdge) throw AssumptionViolation(v.element, v.reason, v.kind);
}

namespace {

CutPolicy policy_of(const SweepOptions& o) { return o.strictAssumption ? CutPolicy::Strict : CutPolicy::AllowSameEdge; }

}  // namespace

BandStructure bulk_band_sweep(const MaterialParams& params, int N, const std::vector<KSample>& path, int nev,
                              const SweepOptions& options)
{
    const HexLattice lattice = HexLattice::honeycomb();
    const Material material(params, MaterialLayout::Bulk, lattice);
    require_assumption(build_torus_mesh(lattice, N), params.radius, options.strictAssumption);
    const auto disc = discretize_torus(lattice, N, params.radius, options.mArc, policy_of(options));

    const auto rows = parallel_map(path.size(), resolve_threads(options.threads), [&](std::size_t i) {
        const NitscheSystem sys = assemble_bulk(disc, material, path[i].k, options.lambdaHat);
        return solve_row(sys.A, sys.B, nev, options.eigen);
    });

    BandStructure bs;
    bs.kind = "bulk";
    bs.samples = path;
    bs.params = params;
    bs.N = N;
    bs.lambdaHat = options.lambdaHat;
    bs.bands.resize(static_cast<Eigen::Index>(path.size()), nev);
    for (std::size_t i = 0; i < rows.size(); ++i) bs.bands.row(static_cast<Eigen::Index>(i)) = rows[i];
    return bs;
}

std::vector<Interval> continuous_spectrum_envelope(const MaterialParams& bulk, double kPar, int N, int nev,
                                                   int lambdaSamples, const SweepOptions& options)
{
    if (lambdaSamples < 2) throw Error("envelope needs at least two lambda samples");
    const HexLattice lattice = HexLattice::honeycomb();
    std::vector<KSample> path(lambdaSamples);
    for (int i = 0; i < lambdaSamples; ++i) {
        const double lambda = -0.5 + static_cast<double>(i) / (lambdaSamples - 1);
        path[i].k = lambda * lattice.k2 + kPar / (2.0 * kPi) * lattice.k1;
        path[i].s = lambda;
    }
    const BandStructure bs = bulk_band_sweep(bulk, N, path, nev, options);
    std::vector<Interval> out(nev);
    for (int b = 0; b < nev; ++b) out[b] = {bs.bands.col(b).minCoeff(), bs.bands.col(b).maxCoeff()};
    return out;
}

std::vector<Interval> edge_envelope(const MaterialParams& edge, double kPar, int N, int nev, int lambdaSamples,
                                    const SweepOptions& options)
{
    const Material m(edge, MaterialLayout::Edge, HexLattice::honeycomb());
    const auto plus = continuous_spectrum_envelope(m.asymptote(+1).params(), kPar, N, nev, lambdaSamples, options);
    const auto minus = continuous_spectrum_envelope(m.asymptote(-1).params(), kPar, N, nev, lambdaSamples, options);
    std::vector<Interval> out(nev);
    for (int b = 0; b < nev; ++b) out[b] = {std::min(plus[b].lo, minus[b].lo), std::max(plus[b].hi, minus[b].hi)};
    return out;
}

std::optional<Interval> first_gap(const std::vector<Interval>& envelope)
{
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b + 1 < envelope.size(); ++b) {
        top = std::max(top, envelope[b].hi);
        if (envelope[b + 1].lo > top) return Interval{top, envelope[b + 1].lo};
    }
    return std::nullopt;
}

int edge_nev_estimate(int L, int bands) { return 2 * L * bands + 5; }

EdgeSweep edge_band_sweep(const MaterialParams& params, int N, int L, const std::vector<KSample>& kPars, int nev,
                          const EdgeSweepOptions& options)
{
    if (nev < 1) throw Error("edge sweep needs nev >= 1");
    const HexLattice lattice = HexLattice::honeycomb();
    const Material material(params, MaterialLayout::Edge, lattice);
    require_assumption(build_cylinder_mesh(lattice, N, L), params.radius, options.strictAssumption);
    const auto disc = discretize_cylinder(lattice, N, L, params.radius, options.mArc, policy_of(options));
    const double cBand = options.cBand > 0.0 ? options.cBand : L / 8.0;

    struct SampleOut {
        Eigen::RowVectorXd E;
        std::vector<ModeField> modes;
    };
    const auto out = parallel_map(kPars.size(), resolve_threads(options.threads), [&](std::size_t i) {
        const NitscheSystem sys = assemble_edge(disc, material, kPars[i].kPar, options.lambdaHat);
        const EigenResult r = solve_smallest(sys.A, sys.B, nev, options.eigen);
        SampleOut so;
        so.E = r.eigenvalues.transpose();
        for (int m = 0; m < r.size(); ++m) {
            const Localization loc = localization(*disc, r.eigenvectors.col(m), cBand);
            ModeField mf;
            mf.sample = static_cast<int>(i);
            mf.index = m;
            mf.energy = r.eigenvalues[m];
            mf.center = loc.center;
            mf.boundary = loc.boundary;
            mf.middle = loc.middle;
            mf.tag = classify_mode(loc, options.thresholds);
            if (options.keepVectors) mf.vector = r.eigenvectors.col(m);
            so.modes.push_back(std::move(mf));
        }
        return so;
    });

    EdgeSweep sweep;
    BandStructure& bs = sweep.bands;
    bs.kind = "edge";
    bs.samples = kPars;
    bs.params = params;
    bs.N = N;
    bs.L = L;
    bs.lambdaHat = options.lambdaHat;
    bs.bands.resize(static_cast<Eigen::Index>(kPars.size()), nev);
    for (std::size_t i = 0; i < out.size(); ++i) {
        bs.bands.row(static_cast<Eigen::Index>(i)) = out[i].E;
        sweep.modes.push_back(out[i].modes);
    }
    return sweep;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& e)
{
    if (h.size() != e.size() || h.size() < 2) throw Error("slope fit needs matching series of length >= 2");
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(e[i] > 0.0) || !(h[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(h[i]), y = std::log(e[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_table(const std::vector<int>& Nlist, const std::vector<double>& h,
                                   const Eigen::MatrixXd& E)
{
    const int levels = static_cast<int>(Nlist.size());
    if (levels < 3) throw Error("convergence study needs at least three meshes");
    for (int i = 1; i < levels; ++i)
        if (Nlist[i] <= Nlist[i - 1]) throw Error("mesh list must be strictly increasing");
    ConvergenceTable t;
    t.N = Nlist;
    t.h = h;
    t.E = E;
    const int modes = static_cast<int>(E.cols());
    t.errors.resize(levels - 1, modes);
    t.slopes.resize(modes);
    for (int m = 0; m < modes; ++m) {
        std::vector<double> hs, es;
        for (int j = 0; j + 1 < levels; ++j) {
            t.errors(j, m) = std::abs(E(j, m) - E(j + 1, m)) / std::abs(E(j + 1, m));
            hs.push_back(h[j]);
            es.push_back(t.errors(j, m));
        }
        t.slopes[m] = fit_slope(hs, es);
    }
    return t;
}

ConvergenceTable convergence_study_bulk(const MaterialParams& params, const Vec2& k, const std::vector<int>& Nlist,
                                        int nev, const SweepOptions& options)
{
    const HexLattice lattice = HexLattice::honeycomb();
    const Material material(params, MaterialLayout::Bulk, lattice);
    const auto rows = parallel_map(Nlist.size(), resolve_threads(options.threads), [&](std::size_t i) {
        require_assumption(build_torus_mesh(lattice, Nlist[i]), params.radius, options.strictAssumption);
        const auto disc = discretize_torus(lattice, Nlist[i], params.radius, options.mArc, policy_of(options));
        const NitscheSystem sys = assemble_bulk(disc, material, k, options.lambdaHat);
        return std::pair{solve_row(sys.A, sys.B, nev, options.eigen), disc->mesh.h};
    });
    Eigen::MatrixXd E(static_cast<Eigen::Index>(Nlist.size()), nev);
    std::vector<double> h;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        E.row(static_cast<Eigen::Index>(i)) = rows[i].first;
        h.push_back(rows[i].second);
    }
    return convergence_table(Nlist, h, E);
}

ConvergenceTable convergence_study_edge(const MaterialParams& params, double kPar, int L,
                                        const std::vector<int>& Nlist, int nev, const SweepOptions& options)
{
    const HexLattice lattice = HexLattice::honeycomb();
    const Material material(params, MaterialLayout::Edge, lattice);
    const auto rows = parallel_map(Nlist.size(), resolve_threads(options.threads), [&](std::size_t i) {
        require_assumption(build_cylinder_mesh(lattice, Nlist[i], L), params.radius, options.strictAssumption);
        const auto disc = discretize_cylinder(lattice, Nlist[i], L, params.radius, options.mArc, policy_of(options));
        const NitscheSystem sys = assemble_edge(disc, material, kPar, options.lambdaHat);
        return std::pair{solve_row(sys.A, sys.B, nev, options.eigen), disc->mesh.h};
    });
    Eigen::MatrixXd E(static_cast<Eigen::Index>(Nlist.size()), nev);
    std::vector<double> h;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        E.row(static_cast<Eigen::Index>(i)) = rows[i].first;
        h.push_back(rows[i].second);
    }
    return convergence_table(Nlist, h, E);
}

std::vector<double> free_spectrum(const HexLattice& lattice, const Vec2& k, int count)
{
    const int R = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)))) + 4;
    std::vector<double> v;
    for (int a = -R; a <= R; ++a)
        for (int b = -R; b <= R; ++b) v.push_back((k + a * lattice.k1 + b * lattice.k2).squaredNorm());
    std::sort(v.begin(), v.end());
    v.resize(std::min<std::size_t>(v.size(), static_cast<std::size_t>(count)));
    return v;
}

}  // namespace bloch_nitsche
