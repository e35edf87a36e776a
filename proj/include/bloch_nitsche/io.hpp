// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Band tables, SVG band diagrams and mode-field dumps.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bloch_nitsche/workflows.hpp"

namespace bloch_nitsche {

/// Header: sample,kx,ky,label,E1..En (bulk, spectral) or sample,kpar,label,E1..En (edge).
/// Doubles are written in shortest round-trip form.
void write_bands_csv(const BandStructure& bs, std::ostream& os);
void write_bands_csv(const BandStructure& bs, const std::string& path);
/// Reads what write_bands_csv wrote: kind, samples (with abscissa recomputed) and bands.
BandStructure read_bands_csv(std::istream& is);
BandStructure read_bands_csv(const std::string& path);

/// Continuous spectrum per sample: lo(i, b), hi(i, b) for band b at sample i.
struct Envelope {
    Eigen::MatrixXd lo, hi;
    bool empty() const { return lo.size() == 0; }
    /// The same intervals at every sample.
    static Envelope constant(const std::vector<Interval>& bands, int samples);
};

struct BandMark {
    double s = 0.0, energy = 0.0;
};

struct SvgStyle {
    int width = 720, height = 480;
    std::string title;
    std::string xLabel;  // empty: "k" for path diagrams, "kpar" for edge
    std::string yLabel = "E";
};

/// One polyline per band, one shaded polygon per envelope band, a circle per mark.
void render_bands_svg(const BandStructure& bs, const Envelope& envelope, const std::vector<BandMark>& marks,
                      std::ostream& os, const SvgStyle& style = {});
void render_bands_svg(const BandStructure& bs, const Envelope& envelope, const std::vector<BandMark>& marks,
                      const std::string& path, const SvgStyle& style = {});

/// |psi| at the centres of a gridRes x gridRes grid over the mesh in lattice
/// coordinates. Points in interface elements use the side the exact circle puts them on.
struct FieldSample {
    Vec2 x;
    double value = 0.0;
};
std::vector<FieldSample> sample_mode_field(const VecXc& vector, const Discretization& disc, int gridRes);
/// Area of one grid sample of sample_mode_field.
double field_sample_area(const Discretization& disc, int gridRes);

/// CSV "x,y,abs_psi", gridRes^2 rows.
void dump_mode_field(const ModeField& mode, const Discretization& disc, int gridRes, std::ostream& os);
void dump_mode_field(const ModeField& mode, const Discretization& disc, int gridRes, const std::string& path);

/// sample,kpar,index,energy,center,boundary,middle,tag
void write_modes_csv(const EdgeSweep& sweep, std::ostream& os);
void write_modes_csv(const EdgeSweep& sweep, const std::string& path);

/// N,h,E1..En,e1..en (errors blank on the first level), then a "slope" row.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& os);
void write_convergence_csv(const ConvergenceTable& table, const std::string& path);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace bloch_nitsche
