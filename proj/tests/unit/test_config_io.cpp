#include <algorithm>
#include <sstream>

#include "bloch_nitsche/config.hpp"
#include "bloch_nitsche/io.hpp"
#include "doctest.h"

using namespace bloch_nitsche;

namespace {

int count(const std::string& text, const std::string& what)
{
    int n = 0;
    for (std::size_t p = text.find(what); p != std::string::npos; p = text.find(what, p + 1)) ++n;
    return n;
}

int lines(const std::string& text)
{
    return int(std::count(text.begin(), text.end(), '\n'));
}

BandStructure small_bulk(int samples, int bands)
{
    const HexLattice lat = HexLattice::honeycomb();
    BandStructure bs;
    bs.kind = "bulk";
    bs.samples = k_path(lat, std::max(1, samples / 3 + 1));
    bs.samples.resize(samples);
    bs.bands.resize(samples, bands);
    for (int i = 0; i < samples; ++i)
        for (int b = 0; b < bands; ++b) bs.bands(i, b) = 1.0 / 3 + 7.1 * b + std::sin(0.37 * i) * 1e-3 + 1e-17 * i;
    return bs;
}

std::string svg(const BandStructure& bs, const Envelope& env = {}, const std::vector<BandMark>& marks = {})
{
    std::ostringstream os;
    render_bands_svg(bs, env, marks, os);
    return os.str();
}

ConfigError config_error(const ConfigEntries& e)
{
    try {
        parse_config(e);
    } catch (const ConfigError& err) {
        return err;
    }
    FAIL("config accepted");
    return ConfigError("", "");
}

}  // namespace

TEST_CASE("config defaults")
{
    const RunConfig c = parse_config({{"J", "2"}, {"N", "16"}});
    CHECK(c.mode == RunMode::BulkBands);
    CHECK(c.N == 16);
    CHECK(c.lambdaHat == 10.0);
    CHECK(c.mArc == 4);
    CHECK(c.material.radius == 0.2);
    CHECK(c.material.epsA == 3.0);
    CHECK(c.material.epsB == 3.0);
    CHECK(c.material.eps0 == 1.0);
    CHECK(c.material.gamma == 0.0);
    CHECK(c.kpath == KPathKind::HighSymmetry);
}

TEST_CASE("config errors name the key")
{
    ConfigError e = config_error({{"J", "-1"}});
    CHECK(e.key() == "J");
    CHECK(std::string(e.what()).find("J > -1") != std::string::npos);

    CHECK(config_error({{"J", "2"}, {"gamma", "1.5"}}).key() == "gamma");
    CHECK(config_error({{"delta", "1.2"}}).key() == "delta");
    CHECK(config_error({{"N", "0"}}).key() == "N");
    CHECK(config_error({{"N", "eight"}}).key() == "N");
    CHECK(config_error({{"radius", "0.5"}}).key() == "radius");
    CHECK(config_error({{"wall", "ramp"}}).key() == "wall");
    CHECK(config_error({{"N_list", "8,16"}}).key() == "N_list");
    CHECK(config_error({{"N_list", "8,32,16"}}).key() == "N_list");
    CHECK(config_error({{"lambda_hat", "-3"}}).key() == "lambda_hat");
    e = config_error({{"colour", "red"}});
    CHECK(e.key() == "colour");
    for (const std::string& k : config_keys()) CHECK(std::string(e.what()).find(k) != std::string::npos);
}

TEST_CASE("edge test-case configuration")
{
    const auto entries = parse_config_text(R"(# domain wall run
mode = edge-bands
J = 2
delta = 0.6
L = 80
N = 64   # fine mesh
)");
    const RunConfig c = parse_config(entries);
    CHECK(c.mode == RunMode::EdgeBands);
    CHECK(c.material.epsA == 3.0);
    CHECK(c.material.eps0 == 1.0);
    CHECK(c.material.delta == 0.6);
    CHECK(c.material.kappaInf == 1.0);
    CHECK(c.material.wall == WallKind::Step);
    CHECK(c.L == 80);
    CHECK(c.N == 64);

    const RunConfig o = parse_config(entries, {{"N", "16"}, {"kpar", "2pi/3, 0.56pi"}});
    CHECK(o.N == 16);
    REQUIRE(o.kpar.size() == 2);
    CHECK(o.kpar[0] == doctest::Approx(2 * kPi / 3));
    CHECK(o.kpar[1] == doctest::Approx(0.56 * kPi));

    CHECK_THROWS_AS(parse_config_text("J 2"), ConfigError);
}

TEST_CASE("explicit permittivities override the contrast")
{
    const RunConfig c = parse_config({{"J", "2"}, {"epsB", "5"}});
    CHECK(c.material.epsA == 3.0);
    CHECK(c.material.epsB == 5.0);
}

TEST_CASE("angles and k points")
{
    CHECK(parse_angle("1.2") == 1.2);
    CHECK(parse_angle("0.56pi") == doctest::Approx(0.56 * kPi));
    CHECK(parse_angle("2pi/3") == doctest::Approx(2 * kPi / 3));
    CHECK(parse_angle("pi") == doctest::Approx(kPi));
    CHECK_THROWS(parse_angle("pie"));

    const HexLattice lat = HexLattice::honeycomb();
    RunConfig c;
    CHECK((config_k_point(c, lat) - high_symmetry_points(lat).k).norm() == 0.0);
    c.kPoint = "M";
    CHECK((config_k_point(c, lat) - high_symmetry_points(lat).m).norm() == 0.0);
    c.kPoint = "0.5,-1";
    CHECK((config_k_point(c, lat) - Vec2(0.5, -1)).norm() == 0.0);
}

TEST_CASE("bands csv")
{
    const BandStructure bs = small_bulk(3, 2);
    std::ostringstream os;
    write_bands_csv(bs, os);
    const std::string text = os.str();
    CHECK(lines(text) == 4);
    CHECK(text.find('\r') == std::string::npos);
    std::istringstream first(text);
    std::string header;
    std::getline(first, header);
    CHECK(header == "sample,kx,ky,label,E1,E2");

    std::istringstream is(text);
    const BandStructure back = read_bands_csv(is);
    CHECK(back.kind == "bulk");
    REQUIRE(back.bands.rows() == 3);
    REQUIRE(back.bands.cols() == 2);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.samples[i].k == bs.samples[i].k);
        CHECK(back.samples[i].label == bs.samples[i].label);
        for (int b = 0; b < 2; ++b) CHECK(back.bands(i, b) == bs.bands(i, b));
    }

    BandStructure edge;
    edge.kind = "edge";
    edge.samples = kpar_samples(4);
    edge.bands = Eigen::MatrixXd::Random(4, 5).cwiseAbs() * 40.0;
    std::ostringstream eo;
    write_bands_csv(edge, eo);
    std::istringstream ei(eo.str());
    std::string eh;
    std::getline(ei, eh);
    CHECK(eh == "sample,kpar,label,E1,E2,E3,E4,E5");
    std::istringstream er(eo.str());
    const BandStructure eb = read_bands_csv(er);
    CHECK(eb.kind == "edge");
    for (int i = 0; i < 4; ++i) {
        CHECK(eb.samples[i].kPar == edge.samples[i].kPar);
        for (int b = 0; b < 5; ++b) CHECK(eb.bands(i, b) == edge.bands(i, b));
    }
}

TEST_CASE("band svg")
{
    const BandStructure bs = small_bulk(10, 2);
    const std::string plain = svg(bs);
    CHECK(count(plain, "<polyline class=\"band\"") == 2);
    CHECK(count(plain, "<polygon class=\"envelope\"") == 0);
    CHECK(plain.find("<svg") != std::string::npos);
    CHECK(plain.find("</svg>") != std::string::npos);
    CHECK(plain.find("&#915;") != std::string::npos);
    CHECK(plain == svg(bs));

    const Envelope env = Envelope::constant({{0.0, 0.5}, {6.0, 8.0}, {12.0, 15.0}}, 10);
    const std::string shaded = svg(bs, env, {{bs.samples[3].s, 3.0}});
    CHECK(count(shaded, "<polygon class=\"envelope\"") == 3);
    CHECK(count(shaded, "<circle class=\"edge-mark\"") == 1);
    CHECK(shaded == svg(bs, env, {{bs.samples[3].s, 3.0}}));

    CHECK_THROWS(svg(small_bulk(1, 2)));
}

TEST_CASE("mode field dump")
{
    const HexLattice lat = HexLattice::honeycomb();
    const auto disc = discretize_torus(lat, 16, 0.2);

    ModeField constant;
    constant.vector = VecXc::Ones(disc->size());
    std::ostringstream os;
    dump_mode_field(constant, *disc, 32, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x,y,abs_psi");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::stod(line.substr(line.rfind(',') + 1)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(rows == 32 * 32);

    const Material mat(MaterialParams::contrast(2.0), MaterialLayout::Bulk, lat);
    const NitscheSystem s = assemble_bulk(disc, mat, high_symmetry_points(lat).k);
    const EigenResult r = solve_smallest(s.A, s.B, 3);
    for (int m = 0; m < 3; ++m) {
        const VecXc x = r.eigenvectors.col(m);
        const double bnorm = std::real(x.dot(s.B * x));
        double mass = 0;
        for (const FieldSample& f : sample_mode_field(x, *disc, 256)) mass += f.value * f.value;
        mass *= field_sample_area(*disc, 256);
        CHECK(mass == doctest::Approx(bnorm).epsilon(0.05));
    }
}

TEST_CASE("modes and convergence csv")
{
    EdgeSweep sweep;
    sweep.bands.kind = "edge";
    sweep.bands.samples = kpar_samples(2);
    sweep.bands.bands = Eigen::MatrixXd::Constant(2, 2, 1.0);
    ModeField m;
    m.energy = 2.5;
    m.center = 0.7;
    m.tag = ModeTag::Edge;
    sweep.modes = {{m, m}, {m, m}};
    std::ostringstream os;
    write_modes_csv(sweep, os);
    CHECK(lines(os.str()) == 5);
    CHECK(os.str().rfind("sample,kpar,index,energy,center,boundary,middle,tag\n", 0) == 0);
    CHECK(count(os.str(), ",edge\n") == 4);

    const Eigen::MatrixXd E = (Eigen::MatrixXd(3, 1) << 2.0, 1.25, 1.0625).finished();
    std::ostringstream co;
    write_convergence_csv(convergence_table({8, 16, 32}, {0.125, 0.0625, 0.03125}, E), co);
    CHECK(lines(co.str()) == 5);
    CHECK(co.str().find("slope") != std::string::npos);
}

TEST_CASE("shortest round-trip formatting")
{
    for (double x : {0.1, 1.0 / 3, 2e-300, 12345.678, -0.0}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
}
