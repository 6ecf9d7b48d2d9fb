#pragma once

#include "edgelab/config.hpp"
#include "edgelab/errors.hpp"
#include "edgelab/spectral.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace edgelab {

inline constexpr const char* tool_version = "edgelab 0.1.0";

/// Fermi level and bulk gap, detected on the torus with the extents of
/// `patch` (extent_x2 rounded up to a multiple of q).
struct BulkGap {
    double mu = 0.0;
    Interval gap;
    std::vector<Interval> gaps;
    LatticePatch torus{2, 2, Boundary::periodic, Boundary::periodic};
};

/// Throws ValidationError "mu_not_in_gap" when a numeric mu lies in no
/// detected gap, or when the requested gap number does not exist.
BulkGap resolve_bulk_gap(const ModelSpec& spec, const LatticePatch& patch, const MuChoice& mu,
                         double min_width);

LatticePatch edge_patch(const EdgeSection& edge);
/// Dirichlet edge operator, plus the configured boundary perturbation.
HermitianOperator edge_hamiltonian(const ModelSpec& spec, const EdgeSection& edge);

struct RunOptions {
    std::optional<std::filesystem::path> out;
    int workers = 1;
    bool no_cache = false;
    std::optional<std::uint64_t> seed_override;
};

struct AnalysisRecord {
    std::string name;
    std::string status; ///< computed, cached, inconclusive, failed
    std::string reason;
    std::string message;
    std::vector<std::string> artifacts;
    double wall_time = 0.0;
    bool cached = false;
    ExitCode code = ExitCode::ok;
};

struct RunManifest {
    std::string config_hash;
    std::string version = tool_version;
    std::filesystem::path output_dir;
    std::vector<AnalysisRecord> analyses;
    ExitCode exit_code = ExitCode::ok;

    nlohmann::json to_json() const;
};

/// Applies the CLI overrides (seed, output directory) to a parsed config.
RunConfig apply_options(RunConfig cfg, const RunOptions& options);

/**
 Runs the named tasks in order and writes their artifacts plus
 manifest.json into the output directory. Tasks are analysis names and
 "sweep". Files left in the output directory by an earlier manifest and not
 produced again are removed, so the manifest always lists every file.
 The cache lives outside the output directory (cache_dir, default
 <output_dir>.cache) and is keyed by the SHA-256 of the tool version, the
 task name and the config subtree the task reads.
 */
RunManifest execute(const RunConfig& cfg, const RunOptions& options,
                    const std::vector<std::string>& tasks);

/// All configured analyses, then the sweep if axes are present.
RunManifest run(const RunConfig& cfg, const RunOptions& options = {});

/// The sweep alone; ValidationError if the config has no sweep axes.
RunManifest sweep(const RunConfig& cfg, const RunOptions& options = {});

} // namespace edgelab
