// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Run configuration: flat "key = value" files with command-line overrides.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bloch_nitsche/material.hpp"
#include "bloch_nitsche/mesh.hpp"

namespace bloch_nitsche {

class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what) : Error(what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class RunMode { BulkBands, EdgeBands, Convergence, SpectralBands, Modes, Check };
enum class KPathKind { HighSymmetry, DualCell };

const char* to_string(RunMode mode);

struct RunConfig {
    RunMode mode = RunMode::BulkBands;
    MaterialParams material;  // radius 0.2, no contrast unless J or eps* given

    int N = 16;
    int L = 20;
    double lambdaHat = 10.0;
    int nev = 0;  // 0: 8 for torus runs, estimated from the envelope for edge runs
    int mArc = 4;

    KPathKind kpath = KPathKind::HighSymmetry;
    int samplesPerLeg = 8;
    int kparSamples = 21;
    std::vector<double> kpar;  // explicit kPar list; overrides kparSamples
    int lambdaSamples = 21;

    Topology topology = Topology::Torus;  // convergence runs
    std::string kPoint = "K";             // G, K, K', M or "kx,ky"
    std::vector<int> Nlist{8, 16, 32};

    int M = 16;
    int gridSize = 0;
    int gridRes = 128;
    int threads = 0;
    std::string out = ".";
};

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// "key = value" lines; '#' starts a comment, blank lines are skipped.
ConfigEntries parse_config_text(std::string_view text, const std::string& source = "<config>");
ConfigEntries read_config_file(const std::string& path);

/// Applies `entries` then `overrides` (later entries win) on top of the defaults
/// and validates the result. Throws ConfigError naming the offending key.
RunConfig parse_config(const ConfigEntries& entries, const ConfigEntries& overrides = {});

/// Every accepted key.
const std::vector<std::string>& config_keys();

/// Reads "<x>", "<x>pi" or "<x>pi/<y>".
double parse_angle(std::string_view text);

/// Resolved Bloch vector for `cfg.kPoint`.
Vec2 config_k_point(const RunConfig& cfg, const HexLattice& lattice);

}  // namespace bloch_nitsche
