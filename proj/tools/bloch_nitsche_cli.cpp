// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// bloch_nitsche: band structures, edge modes and convergence studies for
// honeycomb photonic crystals with the unfitted Nitsche discretization.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "bloch_nitsche/config.hpp"
#include "bloch_nitsche/io.hpp"
#include "bloch_nitsche/parallel.hpp"
#include "bloch_nitsche/spectral.hpp"
#include "bloch_nitsche/workflows.hpp"

namespace bn = bloch_nitsche;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kAssumption = 3, kSolver = 4 };

struct Flags {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::string> out, N, L, J, gamma, delta, lambdaHat, nev, kpath, kparSamples, threads;
};

void add_flags(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config, "key = value configuration file");
    cmd->add_option("--set", f.sets, "extra key=value override (repeatable)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--N", f.N, "mesh subdivisions per lattice vector");
    cmd->add_option("--L", f.L, "cylinder half-length in cells");
    cmd->add_option("--J", f.J, "contrast: eps = 1 + J in the discs, 1 outside");
    cmd->add_option("--gamma", f.gamma, "bulk Faraday coefficient");
    cmd->add_option("--delta", f.delta, "domain-wall strength");
    cmd->add_option("--lambda-hat", f.lambdaHat, "Nitsche penalty factor");
    cmd->add_option("--nev", f.nev, "eigenpairs per sample");
    cmd->add_option("--kpath", f.kpath, "high-symmetry | dual-cell");
    cmd->add_option("--kpar-samples", f.kparSamples, "kPar samples over [0, 2 pi]");
    cmd->add_option("--threads", f.threads, "worker threads (0: all cores)");
}

bn::RunConfig load(const Flags& f, bn::RunMode mode)
{
    bn::ConfigEntries file;
    if (!f.config.empty()) file = bn::read_config_file(f.config);
    bn::ConfigEntries over;
    for (const std::string& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw bn::ConfigError("", "--set expects key=value, got '" + s + "'");
        over.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    const auto put = [&](const char* key, const std::optional<std::string>& v) {
        if (v) over.emplace_back(key, *v);
    };
    put("out", f.out);
    put("N", f.N);
    put("L", f.L);
    put("J", f.J);
    put("gamma", f.gamma);
    put("delta", f.delta);
    put("lambda_hat", f.lambdaHat);
    put("nev", f.nev);
    put("kpath", f.kpath);
    put("kpar_samples", f.kparSamples);
    put("threads", f.threads);
    over.emplace_back("mode", bn::to_string(mode));
    return bn::parse_config(file, over);
}

std::string out_path(const bn::RunConfig& cfg, const std::string& name)
{
    std::filesystem::create_directories(cfg.out);
    return (std::filesystem::path(cfg.out) / name).string();
}

bn::SweepOptions sweep_options(const bn::RunConfig& cfg)
{
    bn::SweepOptions o;
    o.lambdaHat = cfg.lambdaHat;
    o.mArc = cfg.mArc;
    o.threads = cfg.threads;
    return o;
}

std::vector<bn::KSample> bulk_path(const bn::RunConfig& cfg)
{
    const bn::HexLattice lattice = bn::HexLattice::honeycomb();
    return cfg.kpath == bn::KPathKind::HighSymmetry ? bn::k_path(lattice, cfg.samplesPerLeg)
                                                    : bn::dual_cell_boundary_path(lattice, cfg.samplesPerLeg);
}

std::vector<bn::KSample> kpar_path(const bn::RunConfig& cfg)
{
    if (cfg.kpar.empty()) return bn::kpar_samples(cfg.kparSamples);
    std::vector<bn::KSample> out(cfg.kpar.size());
    for (std::size_t i = 0; i < cfg.kpar.size(); ++i) out[i].kPar = out[i].s = cfg.kpar[i];
    return out;
}

void print_bands(const bn::BandStructure& bs)
{
    std::cout << std::setprecision(8);
    for (std::size_t i = 0; i < bs.samples.size(); ++i) {
        std::cout << std::setw(4) << i << ' ' << std::setw(3) << bs.samples[i].label;
        for (Eigen::Index b = 0; b < bs.bands.cols(); ++b) std::cout << ' ' << std::setw(12) << bs.bands(i, b);
        std::cout << '\n';
    }
}

/// Envelope of the continuous spectrum at every kPar, and the nev that reaches
/// past the first gap at every sample.
struct EdgePrep {
    std::vector<std::vector<bn::Interval>> envelopes;
    int nev = 0;
};

EdgePrep prepare_edge(const bn::RunConfig& cfg, const std::vector<bn::KSample>& path)
{
    constexpr int kEnvelopeBands = 4;
    EdgePrep prep;
    int below = 1;
    for (const bn::KSample& s : path) {
        prep.envelopes.push_back(bn::edge_envelope(cfg.material, s.kPar, cfg.N, kEnvelopeBands, cfg.lambdaSamples,
                                                   sweep_options(cfg)));
        const auto& env = prep.envelopes.back();
        for (std::size_t b = 0; b + 1 < env.size(); ++b)
            if (env[b].hi < env[b + 1].lo) {
                below = std::max(below, static_cast<int>(b) + 1);
                break;
            }
    }
    prep.nev = cfg.nev > 0 ? cfg.nev : bn::edge_nev_estimate(cfg.L, below);
    return prep;
}

bn::Envelope to_envelope(const std::vector<std::vector<bn::Interval>>& env)
{
    bn::Envelope e;
    if (env.empty()) return e;
    const std::size_t nb = env.front().size();
    e.lo.resize(static_cast<Eigen::Index>(env.size()), static_cast<Eigen::Index>(nb));
    e.hi.resize(e.lo.rows(), e.lo.cols());
    for (std::size_t i = 0; i < env.size(); ++i)
        for (std::size_t b = 0; b < nb; ++b) {
            e.lo(i, b) = env[i][b].lo;
            e.hi(i, b) = env[i][b].hi;
        }
    return e;
}

int run_bulk(const bn::RunConfig& cfg)
{
    const int nev = cfg.nev > 0 ? cfg.nev : 8;
    const bn::BandStructure bs = bn::bulk_band_sweep(cfg.material, cfg.N, bulk_path(cfg), nev, sweep_options(cfg));
    bn::write_bands_csv(bs, out_path(cfg, "bulk_bands.csv"));
    bn::SvgStyle style;
    style.title = "bulk bands, N = " + std::to_string(cfg.N);
    bn::render_bands_svg(bs, {}, {}, out_path(cfg, "bulk_bands.svg"), style);
    print_bands(bs);
    return kOk;
}

int run_spectral(const bn::RunConfig& cfg)
{
    const int nev = cfg.nev > 0 ? cfg.nev : 8;
    const bn::HexLattice lattice = bn::HexLattice::honeycomb();
    const bn::Material material(cfg.material, bn::MaterialLayout::Bulk, lattice);
    const bn::SpectralModel model(material, cfg.M, cfg.gridSize);
    bn::BandStructure bs;
    bs.kind = "spectral";
    bs.samples = bulk_path(cfg);
    bs.params = cfg.material;
    bs.M = cfg.M;
    const auto rows = bn::parallel_map(bs.samples.size(), bn::resolve_threads(cfg.threads),
                                       [&](std::size_t i) { return model.bands(bs.samples[i].k, nev).eigenvalues; });
    bs.bands.resize(static_cast<Eigen::Index>(rows.size()), nev);
    for (std::size_t i = 0; i < rows.size(); ++i) bs.bands.row(i) = rows[i].head(nev).transpose();
    bn::write_bands_csv(bs, out_path(cfg, "spectral_bands.csv"));
    bn::SvgStyle style;
    style.title = "plane-wave bands, M = " + std::to_string(cfg.M);
    bn::render_bands_svg(bs, {}, {}, out_path(cfg, "spectral_bands.svg"), style);
    print_bands(bs);
    return kOk;
}

int run_edge(const bn::RunConfig& cfg, bool modes)
{
    const std::vector<bn::KSample> path = kpar_path(cfg);
    const EdgePrep prep = prepare_edge(cfg, path);
    bn::EdgeSweepOptions opts;
    static_cast<bn::SweepOptions&>(opts) = sweep_options(cfg);
    opts.keepVectors = modes;
    const bn::EdgeSweep sweep = bn::edge_band_sweep(cfg.material, cfg.N, cfg.L, path, prep.nev, opts);

    std::vector<bn::BandMark> marks;
    for (std::size_t i = 0; i < sweep.modes.size(); ++i)
        for (const bn::ModeField& m : sweep.modes[i])
            if (m.tag == bn::ModeTag::Edge) marks.push_back({path[i].s, m.energy});

    const std::string stem = modes ? "modes" : "edge";
    bn::write_bands_csv(sweep.bands, out_path(cfg, stem + "_bands.csv"));
    bn::write_modes_csv(sweep, out_path(cfg, stem + "_modes.csv"));
    bn::SvgStyle style;
    style.title = "edge bands, N = " + std::to_string(cfg.N) + ", L = " + std::to_string(cfg.L);
    if (sweep.bands.samples.size() >= 2)
        bn::render_bands_svg(sweep.bands, to_envelope(prep.envelopes), marks, out_path(cfg, stem + "_bands.svg"), style);

    std::cout << std::setprecision(8);
    for (std::size_t i = 0; i < sweep.modes.size(); ++i) {
        const auto gap = bn::first_gap(prep.envelopes[i]);
        std::cout << "kpar " << path[i].kPar;
        if (gap) std::cout << "  first gap [" << gap->lo << ", " << gap->hi << "]";
        std::cout << '\n';
        for (const bn::ModeField& m : sweep.modes[i]) {
            if (m.tag == bn::ModeTag::Bulk) continue;
            std::cout << "  mode " << m.index << " E " << m.energy << " center " << m.center << " boundary "
                      << m.boundary << ' ' << bn::to_string(m.tag) << '\n';
        }
    }

    if (modes) {
        const bn::HexLattice lattice = bn::HexLattice::honeycomb();
        const auto disc = bn::discretize_cylinder(lattice, cfg.N, cfg.L, cfg.material.radius, cfg.mArc,
                                                  bn::CutPolicy::AllowSameEdge);
        for (std::size_t i = 0; i < sweep.modes.size(); ++i)
            for (const bn::ModeField& m : sweep.modes[i]) {
                if (m.tag == bn::ModeTag::Bulk) continue;
                const std::string name = "mode_" + std::to_string(i) + "_" + std::to_string(m.index) + ".csv";
                bn::dump_mode_field(m, *disc, cfg.gridRes, out_path(cfg, name));
            }
    }
    return kOk;
}

int run_convergence(const bn::RunConfig& cfg)
{
    const int nev = cfg.nev > 0 ? cfg.nev : 4;
    const bn::HexLattice lattice = bn::HexLattice::honeycomb();
    bn::ConvergenceTable t;
    if (cfg.topology == bn::Topology::Torus) {
        t = bn::convergence_study_bulk(cfg.material, bn::config_k_point(cfg, lattice), cfg.Nlist, nev,
                                       sweep_options(cfg));
    } else {
        const double kPar = cfg.kpar.empty() ? 0.56 * bn::kPi : cfg.kpar.front();
        t = bn::convergence_study_edge(cfg.material, kPar, cfg.L, cfg.Nlist, nev, sweep_options(cfg));
    }
    bn::write_convergence_csv(t, out_path(cfg, "convergence.csv"));
    std::cout << std::setprecision(8);
    for (std::size_t l = 0; l < t.N.size(); ++l) {
        std::cout << "N " << std::setw(4) << t.N[l] << "  E";
        for (Eigen::Index m = 0; m < t.E.cols(); ++m) std::cout << ' ' << std::setw(12) << t.E(l, m);
        if (l > 0) {
            std::cout << "  e";
            for (Eigen::Index m = 0; m < t.E.cols(); ++m) std::cout << ' ' << std::setw(12) << t.errors(l - 1, m);
        }
        std::cout << '\n';
    }
    std::cout << "slopes " << t.slopes.transpose() << '\n';
    return kOk;
}

int run_check(const bn::RunConfig& cfg)
{
    const bn::HexLattice lattice = bn::HexLattice::honeycomb();
    bool ok = true;
    for (const bn::TriMesh& mesh : {bn::build_torus_mesh(lattice, cfg.N), bn::build_cylinder_mesh(lattice, cfg.N, 1)}) {
        const char* name = mesh.topology == bn::Topology::Torus ? "torus" : "cylinder cell";
        const bn::AssumptionReport r = bn::assumption_check(mesh, bn::mesh_inclusions(mesh, cfg.material.radius));
        std::cout << name << " N " << cfg.N << ": " << (r.ok() ? "ok" : "violated") << '\n';
        for (const auto& e : r.violations) std::cout << "  element " << e.element << ": " << e.reason << '\n';
        ok = ok && r.ok();
    }
    std::cout << "material: elliptic\n";
    return ok ? kOk : kAssumption;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unfitted Nitsche band structures and edge modes for honeycomb photonic crystals"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<bn::RunMode, std::string>> modes = {
        {bn::RunMode::BulkBands, "torus band structure along a k-path"},
        {bn::RunMode::EdgeBands, "cylinder eigencurves over kPar with the continuous-spectrum envelope"},
        {bn::RunMode::Convergence, "successive-error slopes over a list of N"},
        {bn::RunMode::SpectralBands, "plane-wave reference bands along a k-path"},
        {bn::RunMode::Modes, "edge-mode classification and field dumps"},
        {bn::RunMode::Check, "mesh assumption and material checks"},
    };
    std::vector<std::pair<CLI::App*, bn::RunMode>> cmds;
    for (const auto& [mode, help] : modes) {
        CLI::App* cmd = app.add_subcommand(bn::to_string(mode), help);
        add_flags(cmd, flags);
        cmds.emplace_back(cmd, mode);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        bn::RunMode mode = bn::RunMode::Check;
        for (const auto& [cmd, m] : cmds)
            if (cmd->parsed()) mode = m;
        const bn::RunConfig cfg = load(flags, mode);
        switch (cfg.mode) {
            case bn::RunMode::BulkBands: return run_bulk(cfg);
            case bn::RunMode::EdgeBands: return run_edge(cfg, false);
            case bn::RunMode::Modes: return run_edge(cfg, true);
            case bn::RunMode::Convergence: return run_convergence(cfg);
            case bn::RunMode::SpectralBands: return run_spectral(cfg);
            case bn::RunMode::Check: return run_check(cfg);
        }
    } catch (const bn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const bn::AssumptionViolation& e) {
        std::cerr << "assumption violated: " << e.what() << '\n';
        return kAssumption;
    } catch (const bn::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
