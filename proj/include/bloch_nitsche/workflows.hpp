// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Band sweeps, continuous-spectrum envelopes, edge-mode classification and
// convergence studies.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bloch_nitsche/assembly.hpp"
#include "bloch_nitsche/eigensolve.hpp"

namespace bloch_nitsche {

struct KSample {
    Vec2 k = Vec2::Zero();
    double kPar = 0.0;  // edge sweeps only
    double s = 0.0;     // abscissa for plotting (arc length or kPar)
    std::string label;  // "G", "K", "M" at path vertices, empty elsewhere
};

/// Gamma -> K -> M -> Gamma, S samples per leg, 3 S + 1 points.
std::vector<KSample> k_path(const HexLattice& lattice, int S);
/// Boundary of the dual cell {t1 k1 + t2 k2 : |t_i| <= 1/2}, S samples per side, 4 S + 1 points.
std::vector<KSample> dual_cell_boundary_path(const HexLattice& lattice, int S);
/// kPar = 2 pi i / (S - 1), i = 0..S-1.
std::vector<KSample> kpar_samples(int S);

struct BandStructure {
    std::string kind;  // bulk, edge, spectral
    std::vector<KSample> samples;
    Eigen::MatrixXd bands;  // sample x mode, rows ascending
    MaterialParams params;
    int N = 0, L = 0, M = 0;
    double lambdaHat = kDefaultLambdaHat;
};

enum class ModeTag { Bulk, Edge, PseudoEdge };
const char* to_string(ModeTag tag);

struct ModeField {
    int sample = 0, index = 0;
    double energy = 0.0;
    double center = 0.0, boundary = 0.0, middle = 0.0;  // squared L2 mass fractions
    ModeTag tag = ModeTag::Bulk;
    VecXc vector;  // empty unless requested
};

struct ModeThresholds {
    double center = 0.6;
    double boundary = 0.6;
};

struct Localization {
    double center = 0.0, boundary = 0.0, middle = 0.0;
};

/// Mass fractions in |tau2| <= cBand, |tau2| >= L - cBand and in between.
Localization localization(const Discretization& disc, const VecXc& x, double cBand);
ModeTag classify_mode(const Localization& loc, const ModeThresholds& thresholds = {});
inline ModeTag classify_mode(const ModeField& mode, const ModeThresholds& thresholds = {})
{
    return classify_mode(Localization{mode.center, mode.boundary, mode.middle}, thresholds);
}

struct SweepOptions {
    double lambdaHat = kDefaultLambdaHat;
    int mArc = 4;
    int threads = 0;  // 0: hardware concurrency (capped by BLOCH_NITSCHE_THREADS)
    /// Reject same-edge crossing pairs too, not only cuts that cannot be built.
    bool strictAssumption = false;
    EigenOptions eigen;
};

/// Throws AssumptionViolation carrying the first offending element; with
/// `strict == false` same-edge crossing pairs pass.
void require_assumption(const TriMesh& mesh, double radius, bool strict);

BandStructure bulk_band_sweep(const MaterialParams& params, int N, const std::vector<KSample>& path, int nev,
                              const SweepOptions& options = {});

struct Interval {
    double lo = 0.0, hi = 0.0;
};

/// Per-band [min, max] of the bulk bands at k = lambda k2 + (kPar / 2 pi) k1,
/// lambda uniform in [-1/2, 1/2].
std::vector<Interval> continuous_spectrum_envelope(const MaterialParams& bulk, double kPar, int N, int nev,
                                                   int lambdaSamples, const SweepOptions& options = {});
/// Union over the two wall asymptotes of an edge material.
std::vector<Interval> edge_envelope(const MaterialParams& edge, double kPar, int N, int nev, int lambdaSamples,
                                    const SweepOptions& options = {});

/// First open gap (hi of band b, lo of band b+1) in an ascending envelope.
std::optional<Interval> first_gap(const std::vector<Interval>& envelope);

struct EdgeSweepOptions : SweepOptions {
    double cBand = -1.0;  // negative: L / 8
    ModeThresholds thresholds;
    bool keepVectors = false;
};

struct EdgeSweep {
    BandStructure bands;
    std::vector<std::vector<ModeField>> modes;  // per sample
};

EdgeSweep edge_band_sweep(const MaterialParams& params, int N, int L, const std::vector<KSample>& kPars, int nev,
                          const EdgeSweepOptions& options = {});

/// Number of cylinder eigenvalues expected below the top of bulk band `bands`, plus 5.
int edge_nev_estimate(int L, int bands);

struct ConvergenceTable {
    std::vector<int> N;
    std::vector<double> h;
    Eigen::MatrixXd E;       // level x mode
    Eigen::MatrixXd errors;  // (levels - 1) x mode
    Eigen::VectorXd slopes;  // per mode
};

/// Relative successive differences and least-squares slopes of log e against log h.
ConvergenceTable convergence_table(const std::vector<int>& Nlist, const std::vector<double>& h,
                                   const Eigen::MatrixXd& E);
double fit_slope(const std::vector<double>& h, const std::vector<double>& e);

ConvergenceTable convergence_study_bulk(const MaterialParams& params, const Vec2& k, const std::vector<int>& Nlist,
                                        int nev, const SweepOptions& options = {});
ConvergenceTable convergence_study_edge(const MaterialParams& params, double kPar, int L,
                                        const std::vector<int>& Nlist, int nev, const SweepOptions& options = {});

/// Sorted |k + G|^2 over the dual lattice, first `count` values.
std::vector<double> free_spectrum(const HexLattice& lattice, const Vec2& k, int count);

}  // namespace bloch_nitsche
