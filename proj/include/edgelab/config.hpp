#pragma once

#include "edgelab/lattice.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace edgelab {

/// Fermi level: a number, or the center of the k-th detected bulk gap
/// (1-based, counted from below), written "auto-center-of-gap-k".
struct MuChoice {
    std::optional<double> value;
    int gap_number = 1;

    std::string str() const;
    static MuChoice parse(const std::string& text);
};

enum class Analysis {
    bulk_index,
    edge_index,
    correspondence,
    edge_spectrum,
    transport,
    mapping_checks,
    locality_checks,
};

std::string to_string(Analysis a);
Analysis analysis_from_string(const std::string& s);

struct EdgeSection {
    int extent_x1 = 24;
    int extent_x2 = 16;
    Boundary bc_x1 = Boundary::open;
    double switch_fraction = 0.9;
    std::optional<int> window_half_width;
    double tau = 0.2;
    double perturbation_amplitude = 0.0;
    double perturbation_xi_prime = 1.0;
    std::uint64_t perturbation_seed = 1;
};

struct SpectrumSection {
    int extent_x2 = 16;
    int k_points = 96;
    int localization_length = 4;
    double eps_fraction = 0.1;
};

struct TransportSection {
    int extent_x1 = 48;
    int extent_x2 = 16;
    double t_max = 12.0;
    int steps = 49;
    int localization_length = 4;
    double eps_fraction = 0.1;
};

struct MappingSection {
    int matrices = 20;
    int dim = 50;
    std::uint64_t seed = 1;
    int arcs = 100;
    int states = 20;
    double eps_fraction = 0.1;
};

struct SweepAxes {
    std::vector<Flux> flux;
    std::vector<double> disorder;
    std::vector<MuChoice> mu;
};

/**
 Declarative run description, read from YAML.

 Top-level keys: model, patch, mu, gap_min_width, analyses, edge, spectrum,
 transport, mapping, sweep, output_dir, cache, cache_dir. Every section
 rejects keys it does not know. `patch` is the bulk geometry; the edge,
 spectrum and transport sections carry their own geometry. The bulk gap is
 always detected on the torus with the extents of `patch` (extent_x2
 rounded up to a multiple of q).
 */
struct RunConfig {
    ModelSpec model;
    LatticePatch patch{18, 18, Boundary::open, Boundary::open};
    MuChoice mu;
    double gap_min_width = 0.5;
    double tau = 0.2;
    std::vector<Analysis> analyses;
    EdgeSection edge;
    SpectrumSection spectrum;
    TransportSection transport;
    MappingSection mapping;
    std::optional<SweepAxes> sweep;
    std::filesystem::path output_dir = "edgelab-out";
    bool cache = true;
    std::optional<std::filesystem::path> cache_dir;

    /// Normalized form with defaults filled in, excluding output and cache
    /// settings. Cache keys and the config hash are taken over this.
    nlohmann::json canonical() const;
};

RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::filesystem::path& path);

} // namespace edgelab
