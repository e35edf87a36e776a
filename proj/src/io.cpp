// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace bloch_nitsche {

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write '" + path + "'");
    return os;
}

void close_out(std::ofstream& os, const std::string& path)
{
    os.flush();
    if (!os) throw Error("write to '" + path + "' failed");
}

double parse_double(const std::string& s)
{
    double x = 0.0;
    const char* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, x);
    if (ec != std::errc() || p != end) throw Error("bad number '" + s + "' in band table");
    return x;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Fixed two-decimal coordinates keep the SVG byte-stable.
std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_text(double x, double step)
{
    const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(step) + 1e-9)), 0, 6);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(x) < 0.5 * step * 1e-6 ? 0.0 : x);
    return buf;
}

double nice_step(double span, int target)
{
    const double raw = span / std::max(target, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

std::string svg_label(const std::string& label)
{
    if (label == "G") return "&#915;";
    return label;
}

}  // namespace

std::string format_double(double x)
{
    std::array<char, 64> buf{};
    const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) throw Error("number formatting failed");
    return std::string(buf.data(), p);
}

void write_bands_csv(const BandStructure& bs, std::ostream& os)
{
    if (bs.bands.rows() != static_cast<Eigen::Index>(bs.samples.size()))
        throw Error("band table rows do not match the samples");
    const bool edge = bs.kind == "edge";
    os << (edge ? "sample,kpar,label" : "sample,kx,ky,label");
    for (Eigen::Index b = 0; b < bs.bands.cols(); ++b) os << ",E" << b + 1;
    os << '\n';
    for (std::size_t i = 0; i < bs.samples.size(); ++i) {
        const KSample& s = bs.samples[i];
        os << i;
        if (edge)
            os << ',' << format_double(s.kPar);
        else
            os << ',' << format_double(s.k[0]) << ',' << format_double(s.k[1]);
        os << ',' << s.label;
        for (Eigen::Index b = 0; b < bs.bands.cols(); ++b) os << ',' << format_double(bs.bands(i, b));
        os << '\n';
    }
}

void write_bands_csv(const BandStructure& bs, const std::string& path)
{
    std::ofstream os = open_out(path);
    write_bands_csv(bs, os);
    close_out(os, path);
}

BandStructure read_bands_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw Error("empty band table");
    const std::vector<std::string> header = split_csv(line);
    BandStructure bs;
    std::size_t prefix = 0;
    if (header.size() >= 3 && header[0] == "sample" && header[1] == "kpar" && header[2] == "label") {
        bs.kind = "edge";
        prefix = 3;
    } else if (header.size() >= 4 && header[0] == "sample" && header[1] == "kx" && header[2] == "ky" &&
               header[3] == "label") {
        bs.kind = "bulk";
        prefix = 4;
    } else {
        throw Error("unrecognised band table header");
    }
    const std::size_t nb = header.size() - prefix;
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != header.size()) throw Error("band table row has the wrong column count");
        KSample s;
        if (prefix == 3) {
            s.kPar = parse_double(f[1]);
            s.s = s.kPar;
        } else {
            s.k = Vec2(parse_double(f[1]), parse_double(f[2]));
            s.s = bs.samples.empty() ? 0.0 : bs.samples.back().s + (s.k - bs.samples.back().k).norm();
        }
        s.label = f[prefix - 1];
        std::vector<double> e(nb);
        for (std::size_t b = 0; b < nb; ++b) e[b] = parse_double(f[prefix + b]);
        rows.push_back(std::move(e));
        bs.samples.push_back(std::move(s));
    }
    bs.bands.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nb));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t b = 0; b < nb; ++b) bs.bands(i, b) = rows[i][b];
    return bs;
}

BandStructure read_bands_csv(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read '" + path + "'");
    return read_bands_csv(is);
}

Envelope Envelope::constant(const std::vector<Interval>& bands, int samples)
{
    Envelope e;
    e.lo.resize(samples, static_cast<Eigen::Index>(bands.size()));
    e.hi.resize(samples, static_cast<Eigen::Index>(bands.size()));
    for (int i = 0; i < samples; ++i)
        for (std::size_t b = 0; b < bands.size(); ++b) {
            e.lo(i, b) = bands[b].lo;
            e.hi(i, b) = bands[b].hi;
        }
    return e;
}

void render_bands_svg(const BandStructure& bs, const Envelope& envelope, const std::vector<BandMark>& marks,
                      std::ostream& os, const SvgStyle& style)
{
    const std::size_t ns = bs.samples.size();
    if (ns < 2) throw Error("a band diagram needs at least two samples");
    if (bs.bands.rows() != static_cast<Eigen::Index>(ns)) throw Error("band table rows do not match the samples");
    if (!envelope.empty() && (envelope.lo.rows() != static_cast<Eigen::Index>(ns) ||
                              envelope.hi.rows() != envelope.lo.rows() || envelope.hi.cols() != envelope.lo.cols()))
        throw Error("envelope does not match the samples");

    const double x0 = bs.samples.front().s, x1 = bs.samples.back().s;
    if (!(x1 > x0)) throw Error("band diagram abscissa must increase");
    double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
    const auto grow = [&](double v) {
        if (std::isfinite(v)) {
            y0 = std::min(y0, v);
            y1 = std::max(y1, v);
        }
    };
    for (Eigen::Index i = 0; i < bs.bands.size(); ++i) grow(bs.bands.data()[i]);
    if (!envelope.empty())
        for (Eigen::Index i = 0; i < envelope.lo.size(); ++i) {
            grow(envelope.lo.data()[i]);
            grow(envelope.hi.data()[i]);
        }
    if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.03 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double left = 70, right = 20, top = style.title.empty() ? 20 : 40, bottom = 50;
    const double W = style.width, H = style.height;
    const double pw = W - left - right, ph = H - top - bottom;
    const auto X = [&](double s) { return left + (s - x0) / (x1 - x0) * pw; };
    const auto Y = [&](double e) { return top + (y1 - e) / (y1 - y0) * ph; };
    const bool edge = bs.kind == "edge";

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
       << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
    os << "<style>\n"
          ".band{fill:none;stroke:#1f4e8c;stroke-width:1.2}\n"
          ".envelope{fill:#9db4d3;fill-opacity:0.35;stroke:none}\n"
          ".edge-mark{fill:none;stroke:#c0392b;stroke-width:1.5}\n"
          ".axis{stroke:#000;stroke-width:1}\n"
          ".tick{stroke:#000;stroke-width:1}\n"
          ".grid{stroke:#bbb;stroke-width:0.6;stroke-dasharray:3,3}\n"
          "text{font-family:sans-serif;font-size:12px}\n"
          "</style>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height << "\" fill=\"#fff\"/>\n";
    if (!style.title.empty())
        os << "<text x=\"" << fmt(W / 2) << "\" y=\"24\" text-anchor=\"middle\">" << style.title << "</text>\n";

    for (Eigen::Index b = 0; !envelope.empty() && b < envelope.lo.cols(); ++b) {
        os << "<polygon class=\"envelope\" points=\"";
        for (std::size_t i = 0; i < ns; ++i)
            os << (i ? " " : "") << fmt(X(bs.samples[i].s)) << ',' << fmt(Y(envelope.hi(i, b)));
        for (std::size_t i = ns; i-- > 0;) os << ' ' << fmt(X(bs.samples[i].s)) << ',' << fmt(Y(envelope.lo(i, b)));
        os << "\"/>\n";
    }

    // Axes and ticks.
    os << "<line class=\"axis\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw)
       << "\" y2=\"" << fmt(top + ph) << "\"/>\n";
    os << "<line class=\"axis\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left)
       << "\" y2=\"" << fmt(top + ph) << "\"/>\n";
    const double ys = nice_step(y1 - y0, 6);
    for (double y = std::ceil(y0 / ys) * ys; y <= y1 + 1e-9 * ys; y += ys) {
        os << "<line class=\"tick\" x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(Y(y)) << "\" x2=\"" << fmt(left)
           << "\" y2=\"" << fmt(Y(y)) << "\"/>\n";
        os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(Y(y) + 4) << "\" text-anchor=\"end\">"
           << tick_text(y, ys) << "</text>\n";
    }
    bool labelled = false;
    for (std::size_t i = 0; i < ns && !edge; ++i) {
        const KSample& s = bs.samples[i];
        if (s.label.empty()) continue;
        labelled = true;
        os << "<line class=\"grid\" x1=\"" << fmt(X(s.s)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(X(s.s))
           << "\" y2=\"" << fmt(top + ph) << "\"/>\n";
        os << "<line class=\"tick\" x1=\"" << fmt(X(s.s)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\""
           << fmt(X(s.s)) << "\" y2=\"" << fmt(top + ph + 5) << "\"/>\n";
        os << "<text x=\"" << fmt(X(s.s)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
           << svg_label(s.label) << "</text>\n";
    }
    if (!labelled) {
        const double xs = nice_step(x1 - x0, 6);
        for (double x = std::ceil(x0 / xs) * xs; x <= x1 + 1e-9 * xs; x += xs) {
            os << "<line class=\"tick\" x1=\"" << fmt(X(x)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(X(x))
               << "\" y2=\"" << fmt(top + ph + 5) << "\"/>\n";
            os << "<text x=\"" << fmt(X(x)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
               << tick_text(x, xs) << "</text>\n";
        }
    }
    const std::string xLabel = !style.xLabel.empty() ? style.xLabel : (edge ? "kpar" : "k");
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 10) << "\" text-anchor=\"middle\">" << xLabel
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << fmt(top + ph / 2) << ")\">" << style.yLabel << "</text>\n";

    for (Eigen::Index b = 0; b < bs.bands.cols(); ++b) {
        os << "<polyline class=\"band\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < ns; ++i) {
            const double e = bs.bands(i, b);
            if (!std::isfinite(e)) continue;
            os << (first ? "" : " ") << fmt(X(bs.samples[i].s)) << ',' << fmt(Y(e));
            first = false;
        }
        os << "\"/>\n";
    }
    for (const BandMark& m : marks)
        os << "<circle class=\"edge-mark\" cx=\"" << fmt(X(m.s)) << "\" cy=\"" << fmt(Y(m.energy))
           << "\" r=\"3\"/>\n";
    os << "</svg>\n";
}

void render_bands_svg(const BandStructure& bs, const Envelope& envelope, const std::vector<BandMark>& marks,
                      const std::string& path, const SvgStyle& style)
{
    std::ostringstream buf;
    render_bands_svg(bs, envelope, marks, buf, style);
    std::ofstream os = open_out(path);
    os << buf.str();
    close_out(os, path);
}

std::vector<FieldSample> sample_mode_field(const VecXc& vector, const Discretization& disc, int gridRes)
{
    if (gridRes < 1) throw Error("grid resolution must be positive");
    if (vector.size() != disc.size()) throw Error("mode vector does not match the discretization");
    const TriMesh& mesh = disc.mesh;
    const double t2span = static_cast<double>(mesh.rows) / mesh.N;
    std::vector<FieldSample> out;
    out.reserve(static_cast<std::size_t>(gridRes) * gridRes);
    for (int j = 0; j < gridRes; ++j) {
        for (int i = 0; i < gridRes; ++i) {
            const Vec2 t((i + 0.5) / gridRes, mesh.tMin + (j + 0.5) * t2span / gridRes);
            const Vec2 x = mesh.lattice.point(t[0], t[1]);
            const std::size_t e = mesh.locate(t);
            const Classification& cls = disc.cut.kinds[e];
            Side side = cls.kind == ElementKind::Inner ? Side::Inner : Side::Outer;
            if (cls.kind == ElementKind::Interface) {
                const Inclusion& inc = disc.inclusions[cls.inclusion];
                side = (x - inc.center).norm() <= inc.radius ? Side::Inner : Side::Outer;
            }
            const Eigen::Vector3d lam = mesh.triangle(e).barycentric(x);
            cplx v(0.0);
            for (int a = 0; a < 3; ++a) {
                const int d = disc.dofs.dof(side, mesh.triangles[e][a]);
                if (d >= 0) v += lam[a] * vector[d];
            }
            out.push_back({x, std::abs(v)});
        }
    }
    return out;
}

double field_sample_area(const Discretization& disc, int gridRes)
{
    const TriMesh& mesh = disc.mesh;
    const double t2span = static_cast<double>(mesh.rows) / mesh.N;
    return mesh.lattice.cellArea * t2span / (static_cast<double>(gridRes) * gridRes);
}

void dump_mode_field(const ModeField& mode, const Discretization& disc, int gridRes, std::ostream& os)
{
    if (mode.vector.size() == 0) throw Error("mode carries no eigenvector");
    os << "x,y,abs_psi\n";
    for (const FieldSample& s : sample_mode_field(mode.vector, disc, gridRes))
        os << format_double(s.x[0]) << ',' << format_double(s.x[1]) << ',' << format_double(s.value) << '\n';
}

void dump_mode_field(const ModeField& mode, const Discretization& disc, int gridRes, const std::string& path)
{
    std::ofstream os = open_out(path);
    dump_mode_field(mode, disc, gridRes, os);
    close_out(os, path);
}

void write_modes_csv(const EdgeSweep& sweep, std::ostream& os)
{
    os << "sample,kpar,index,energy,center,boundary,middle,tag\n";
    for (std::size_t i = 0; i < sweep.modes.size(); ++i)
        for (const ModeField& m : sweep.modes[i])
            os << i << ',' << format_double(sweep.bands.samples[i].kPar) << ',' << m.index << ','
               << format_double(m.energy) << ',' << format_double(m.center) << ',' << format_double(m.boundary) << ','
               << format_double(m.middle) << ',' << to_string(m.tag) << '\n';
}

void write_modes_csv(const EdgeSweep& sweep, const std::string& path)
{
    std::ofstream os = open_out(path);
    write_modes_csv(sweep, os);
    close_out(os, path);
}

void write_convergence_csv(const ConvergenceTable& t, std::ostream& os)
{
    const Eigen::Index nm = t.E.cols();
    os << "N,h";
    for (Eigen::Index m = 0; m < nm; ++m) os << ",E" << m + 1;
    for (Eigen::Index m = 0; m < nm; ++m) os << ",e" << m + 1;
    os << '\n';
    for (std::size_t l = 0; l < t.N.size(); ++l) {
        os << t.N[l] << ',' << format_double(t.h[l]);
        for (Eigen::Index m = 0; m < nm; ++m) os << ',' << format_double(t.E(l, m));
        for (Eigen::Index m = 0; m < nm; ++m) os << ',' << (l == 0 ? std::string() : format_double(t.errors(l - 1, m)));
        os << '\n';
    }
    os << "slope,";
    for (Eigen::Index m = 0; m < nm; ++m) os << ',';
    for (Eigen::Index m = 0; m < nm; ++m) os << ',' << format_double(t.slopes[m]);
    os << '\n';
}

void write_convergence_csv(const ConvergenceTable& t, const std::string& path)
{
    std::ofstream os = open_out(path);
    write_convergence_csv(t, os);
    close_out(os, path);
}

}  // namespace bloch_nitsche
