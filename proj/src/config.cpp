// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bloch_nitsche {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& value)
{
    double x = 0.0;
    const char* end = value.data() + value.size();
    const auto [p, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc() || p != end || !std::isfinite(x))
        throw ConfigError(key, key + ": '" + value + "' is not a number");
    return x;
}

long to_long(const std::string& key, const std::string& value)
{
    long x = 0;
    const char* end = value.data() + value.size();
    const auto [p, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc() || p != end) throw ConfigError(key, key + ": '" + value + "' is not an integer");
    return x;
}

int int_in(const std::string& key, const std::string& value, long lo, long hi)
{
    const long x = to_long(key, value);
    if (x < lo || x > hi) {
        std::ostringstream os;
        os << key << " = " << x << " is out of range, accepted [" << lo << ", " << hi << "]";
        throw ConfigError(key, os.str());
    }
    return static_cast<int>(x);
}

double positive(const std::string& key, const std::string& value)
{
    const double x = to_double(key, value);
    if (!(x > 0.0)) throw ConfigError(key, key + " = " + value + " is out of range, accepted (0, inf)");
    return x;
}

template <class E>
E choice(const std::string& key, const std::string& value, const std::vector<std::pair<std::string, E>>& options)
{
    for (const auto& [name, e] : options)
        if (name == value) return e;
    std::string accepted;
    for (const auto& o : options) accepted += (accepted.empty() ? "" : " | ") + o.first;
    throw ConfigError(key, key + " = '" + value + "' is not one of " + accepted);
}

constexpr long kMaxInt = 1L << 20;

struct Pending {
    bool haveJ = false;
    double J = 0.0;
    std::map<std::string, double> eps;  // explicit epsA / epsB / eps0
};

using Setter = std::function<void(RunConfig&, Pending&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"mode",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.mode = choice<RunMode>(k, v,
                                      {{"bulk-bands", RunMode::BulkBands},
                                       {"edge-bands", RunMode::EdgeBands},
                                       {"convergence", RunMode::Convergence},
                                       {"spectral-bands", RunMode::SpectralBands},
                                       {"modes", RunMode::Modes},
                                       {"check", RunMode::Check}});
         }},
        {"J",
         [](RunConfig&, Pending& p, const std::string& k, const std::string& v) {
             p.haveJ = true;
             p.J = to_double(k, v);
         }},
        {"epsA", [](RunConfig&, Pending& p, const std::string& k, const std::string& v) { p.eps[k] = to_double(k, v); }},
        {"epsB", [](RunConfig&, Pending& p, const std::string& k, const std::string& v) { p.eps[k] = to_double(k, v); }},
        {"eps0", [](RunConfig&, Pending& p, const std::string& k, const std::string& v) { p.eps[k] = to_double(k, v); }},
        {"gamma",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.material.gamma = to_double(k, v); }},
        {"delta",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.material.delta = to_double(k, v); }},
        {"kappa_inf",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.material.kappaInf = positive(k, v); }},
        {"radius",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             const double r = to_double(k, v);
             const double rMax = std::sqrt(3.0) / 6.0;  // half the A-B distance
             if (!(r > 0.0 && r < rMax)) {
                 std::ostringstream os;
                 os << k << " = " << v << " is out of range, accepted (0, " << rMax << ")";
                 throw ConfigError(k, os.str());
             }
             c.material.radius = r;
         }},
        {"wall",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.material.wall = choice<WallKind>(k, v, {{"step", WallKind::Step}, {"tanh", WallKind::Tanh}});
         }},
        {"form",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.material.form = choice<WeightForm>(
                 k, v, {{"exact-inverse", WeightForm::ExactInverse}, {"first-order", WeightForm::FirstOrder}});
         }},
        {"N", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.N = int_in(k, v, 1, 4096); }},
        {"L", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.L = int_in(k, v, 1, 4096); }},
        {"lambda_hat",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.lambdaHat = positive(k, v); }},
        {"nev", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.nev = int_in(k, v, 1, kMaxInt); }},
        {"m_arc", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.mArc = int_in(k, v, 1, 64); }},
        {"kpath",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.kpath = choice<KPathKind>(k, v, {{"high-symmetry", KPathKind::HighSymmetry}, {"dual-cell", KPathKind::DualCell}});
         }},
        {"samples_per_leg",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.samplesPerLeg = int_in(k, v, 1, kMaxInt); }},
        {"kpar_samples",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.kparSamples = int_in(k, v, 2, kMaxInt); }},
        {"kpar",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.kpar.clear();
             for (const std::string& item : split_list(v)) {
                 try {
                     c.kpar.push_back(parse_angle(item));
                 } catch (const Error&) {
                     throw ConfigError(k, k + ": '" + item + "' is not a number, <x>pi or <x>pi/<y>");
                 }
             }
             if (c.kpar.empty()) throw ConfigError(k, k + " needs at least one value");
         }},
        {"lambda_samples",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.lambdaSamples = int_in(k, v, 2, kMaxInt); }},
        {"topology",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.topology = choice<Topology>(k, v, {{"torus", Topology::Torus}, {"cylinder", Topology::Cylinder}});
         }},
        {"k", [](RunConfig& c, Pending&, const std::string&, const std::string& v) { c.kPoint = v; }},
        {"N_list",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             c.Nlist.clear();
             for (const std::string& item : split_list(v)) c.Nlist.push_back(int_in(k, item, 1, 4096));
             if (c.Nlist.size() < 3) throw ConfigError(k, k + " needs at least 3 levels");
             for (std::size_t i = 1; i < c.Nlist.size(); ++i)
                 if (c.Nlist[i] <= c.Nlist[i - 1]) throw ConfigError(k, k + " must be strictly increasing");
         }},
        {"M", [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.M = int_in(k, v, 2, 512); }},
        {"grid_size",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.gridSize = int_in(k, v, 0, 1 << 14); }},
        {"grid_res",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.gridRes = int_in(k, v, 2, 1 << 13); }},
        {"threads",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) { c.threads = int_in(k, v, 0, 4096); }},
        {"out",
         [](RunConfig& c, Pending&, const std::string& k, const std::string& v) {
             if (v.empty()) throw ConfigError(k, k + " must not be empty");
             c.out = v;
         }},
    };
    return table;
}

void validate_material(const RunConfig& c, const Pending& p)
{
    const auto eps_key = [&](const char* name) -> std::string { return p.eps.count(name) || !p.haveJ ? name : "J"; };
    const MaterialParams& m = c.material;
    for (auto [name, eps] : {std::pair{"epsA", m.epsA}, std::pair{"epsB", m.epsB}, std::pair{"eps0", m.eps0}}) {
        if (!(eps > 0.0)) {
            const std::string key = eps_key(name);
            std::ostringstream os;
            if (key == "J")
                os << "J = " << p.J << " gives " << name << " = " << eps << "; accepted J > -1";
            else
                os << name << " = " << eps << " is out of range, accepted (0, inf)";
            throw ConfigError(key, os.str());
        }
    }
    const double epsMin = std::min({m.epsA, m.epsB, m.eps0});
    if (!(std::abs(m.gamma) < epsMin)) {
        std::ostringstream os;
        os << "gamma = " << m.gamma << " makes the weight non-elliptic, accepted |gamma| < " << epsMin;
        throw ConfigError("gamma", os.str());
    }
    if (!(std::abs(m.delta * m.kappaInf) < epsMin)) {
        std::ostringstream os;
        os << "delta = " << m.delta << " makes the weight non-elliptic, accepted |delta * kappa_inf| < " << epsMin;
        throw ConfigError("delta", os.str());
    }
    try {
        m.validate(MaterialLayout::Bulk);
        m.validate(MaterialLayout::Edge);
    } catch (const MaterialError& e) {
        throw ConfigError("material", e.what());
    }
}

}  // namespace

const char* to_string(RunMode mode)
{
    switch (mode) {
        case RunMode::BulkBands: return "bulk-bands";
        case RunMode::EdgeBands: return "edge-bands";
        case RunMode::Convergence: return "convergence";
        case RunMode::SpectralBands: return "spectral-bands";
        case RunMode::Modes: return "modes";
        case RunMode::Check: return "check";
    }
    return "?";
}

double parse_angle(std::string_view text)
{
    const std::string s = trim(text);
    const auto pi = s.find("pi");
    if (pi == std::string::npos) return to_double("value", s);
    double scale = 1.0;
    if (pi > 0) scale = to_double("value", s.substr(0, pi));
    const std::string rest = s.substr(pi + 2);
    double denom = 1.0;
    if (!rest.empty()) {
        if (rest[0] != '/') throw Error("malformed angle '" + s + "'");
        denom = to_double("value", rest.substr(1));
        if (denom == 0.0) throw Error("malformed angle '" + s + "'");
    }
    return scale * kPi / denom;
}

ConfigEntries parse_config_text(std::string_view text, const std::string& source)
{
    ConfigEntries out;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("", source + ":" + std::to_string(lineNo) + ": expected 'key = value'");
        std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw ConfigError("", source + ":" + std::to_string(lineNo) + ": empty key");
        out.emplace_back(std::move(key), trim(std::string_view(t).substr(eq + 1)));
    }
    return out;
}

ConfigEntries read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, fn] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

RunConfig parse_config(const ConfigEntries& entries, const ConfigEntries& overrides)
{
    RunConfig cfg;
    Pending pending;
    const auto& table = setters();
    for (const ConfigEntries* list : {&entries, &overrides}) {
        for (const auto& [key, value] : *list) {
            const auto it = table.find(key);
            if (it == table.end()) {
                std::string accepted;
                for (const std::string& k : config_keys()) accepted += (accepted.empty() ? "" : ", ") + k;
                throw ConfigError(key, "unknown key '" + key + "'; accepted keys: " + accepted);
            }
            it->second(cfg, pending, key, value);
        }
    }
    if (pending.haveJ) {
        cfg.material.epsA = cfg.material.epsB = 1.0 + pending.J;
        cfg.material.eps0 = 1.0;
    }
    for (const auto& [name, eps] : pending.eps) {
        if (name == "epsA") cfg.material.epsA = eps;
        if (name == "epsB") cfg.material.epsB = eps;
        if (name == "eps0") cfg.material.eps0 = eps;
    }
    validate_material(cfg, pending);
    if (cfg.gridSize != 0 && cfg.gridSize < 4 * cfg.M) {
        std::ostringstream os;
        os << "grid_size = " << cfg.gridSize << " is out of range, accepted 0 or >= 4 M = " << 4 * cfg.M;
        throw ConfigError("grid_size", os.str());
    }
    try {
        config_k_point(cfg, HexLattice::honeycomb());
    } catch (const Error& e) {
        throw ConfigError("k", e.what());
    }
    return cfg;
}

Vec2 config_k_point(const RunConfig& cfg, const HexLattice& lattice)
{
    const SymmetryPoints sp = high_symmetry_points(lattice);
    const std::string& s = cfg.kPoint;
    if (s == "G") return sp.gamma;
    if (s == "K") return sp.k;
    if (s == "K'") return sp.kprime;
    if (s == "M") return sp.m;
    const auto parts = split_list(s);
    if (parts.size() != 2) throw Error("k = '" + s + "': accepted G | K | K' | M | <kx>,<ky>");
    return Vec2(to_double("k", parts[0]), to_double("k", parts[1]));
}

}  // namespace bloch_nitsche
