#include "edgelab/config.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/serialization.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace edgelab {

namespace {

constexpr const char* auto_prefix = "auto-center-of-gap-";

void check_keys(const YAML::Node& node, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!node.IsMap())
        throw ValidationError("bad_config", where + " must be a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key))
            throw ValidationError("unknown_key", "unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
    if (!node[key])
        return;
    try {
        out = node[key].as<T>();
    } catch (const YAML::Exception&) {
        throw ValidationError("bad_value", "bad value for '" + std::string(key) + "' in " + where);
    }
}

Boundary read_boundary(const YAML::Node& node, const char* key, Boundary fallback) {
    if (!node[key])
        return fallback;
    return boundary_from_string(node[key].as<std::string>());
}

void require_positive(int v, const std::string& name) {
    if (v < 1)
        throw ValidationError("bad_value", name + " must be positive");
}

} // namespace

std::string MuChoice::str() const {
    if (value)
        return nlohmann::json(*value).dump();
    return auto_prefix + std::to_string(gap_number);
}

MuChoice MuChoice::parse(const std::string& text) {
    MuChoice m;
    if (text.rfind(auto_prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            const std::string tail = text.substr(std::string(auto_prefix).size());
            m.gap_number = std::stoi(tail, &used);
            if (used != tail.size() || m.gap_number < 1)
                throw std::invalid_argument("gap");
        } catch (const std::exception&) {
            throw ValidationError("bad_mu", "cannot parse mu '" + text + "'");
        }
        return m;
    }
    try {
        std::size_t used = 0;
        m.value = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument("mu");
    } catch (const std::exception&) {
        throw ValidationError("bad_mu", "cannot parse mu '" + text + "'");
    }
    return m;
}

std::string to_string(Analysis a) {
    switch (a) {
    case Analysis::bulk_index: return "bulk_index";
    case Analysis::edge_index: return "edge_index";
    case Analysis::correspondence: return "correspondence";
    case Analysis::edge_spectrum: return "edge_spectrum";
    case Analysis::transport: return "transport";
    case Analysis::mapping_checks: return "mapping_checks";
    case Analysis::locality_checks: return "locality_checks";
    }
    return "";
}

Analysis analysis_from_string(const std::string& s) {
    for (int i = 0; i <= int(Analysis::locality_checks); ++i)
        if (to_string(Analysis(i)) == s)
            return Analysis(i);
    throw ValidationError("bad_analysis", "unknown analysis '" + s + "'");
}

nlohmann::json RunConfig::canonical() const {
    nlohmann::json j;
    j["model"] = to_json(model);
    j["patch"] = to_json(patch);
    j["mu"] = mu.str();
    j["gap_min_width"] = gap_min_width;
    j["tau"] = tau;
    auto& names = j["analyses"] = nlohmann::json::array();
    for (Analysis a : analyses)
        names.push_back(to_string(a));
    j["edge"] = {
        {"extent_x1", edge.extent_x1},
        {"extent_x2", edge.extent_x2},
        {"bc_x1", to_string(edge.bc_x1)},
        {"switch_fraction", edge.switch_fraction},
        {"window_half_width", edge.window_half_width ? nlohmann::json(*edge.window_half_width)
                                                     : nlohmann::json(nullptr)},
        {"tau", edge.tau},
        {"perturbation",
         {{"amplitude", edge.perturbation_amplitude},
          {"xi_prime", edge.perturbation_xi_prime},
          {"seed", edge.perturbation_seed}}},
    };
    j["spectrum"] = {{"extent_x2", spectrum.extent_x2},
                     {"k_points", spectrum.k_points},
                     {"localization_length", spectrum.localization_length},
                     {"eps_fraction", spectrum.eps_fraction}};
    j["transport"] = {{"extent_x1", transport.extent_x1},
                      {"extent_x2", transport.extent_x2},
                      {"t_max", transport.t_max},
                      {"steps", transport.steps},
                      {"localization_length", transport.localization_length},
                      {"eps_fraction", transport.eps_fraction}};
    j["mapping"] = {{"matrices", mapping.matrices}, {"dim", mapping.dim},
                    {"seed", mapping.seed},         {"arcs", mapping.arcs},
                    {"states", mapping.states},     {"eps_fraction", mapping.eps_fraction}};
    if (sweep) {
        nlohmann::json s;
        for (const Flux& f : sweep->flux)
            s["flux"].push_back(f.str());
        s["disorder"] = sweep->disorder;
        for (const MuChoice& m : sweep->mu)
            s["mu"].push_back(m.str());
        j["sweep"] = s;
    }
    return j;
}

RunConfig parse_config(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ValidationError("bad_yaml", std::string("config is not valid YAML: ") + e.what());
    }
    check_keys(root, "config",
               {"model", "patch", "mu", "gap_min_width", "tau", "analyses", "edge", "spectrum",
                "transport", "mapping", "sweep", "output_dir", "cache", "cache_dir"});

    RunConfig c;
    if (!root["model"])
        throw ValidationError("missing_key", "config needs a model section");
    {
        const YAML::Node m = root["model"];
        check_keys(m, "model", {"kind", "flux", "disorder", "seed", "onsite_gap"});
        std::string kind = "hofstadter";
        read(m, "kind", kind, "model");
        c.model.kind = model_kind_from_string(kind);
        if (m["flux"])
            c.model.flux = Flux::parse(m["flux"].as<std::string>());
        read(m, "disorder", c.model.disorder_strength, "model");
        read(m, "seed", c.model.rng_seed, "model");
        read(m, "onsite_gap", c.model.onsite_gap, "model");
        if (c.model.disorder_strength < 0.0)
            throw ValidationError("negative_disorder", "disorder must be nonnegative");
    }
    if (root["patch"]) {
        const YAML::Node p = root["patch"];
        check_keys(p, "patch", {"extent_x1", "extent_x2", "bc_x1", "bc_x2"});
        int e1 = 18, e2 = 18;
        read(p, "extent_x1", e1, "patch");
        read(p, "extent_x2", e2, "patch");
        c.patch = build_patch(e1, e2, read_boundary(p, "bc_x1", Boundary::open),
                              read_boundary(p, "bc_x2", Boundary::open));
    }
    if (root["mu"])
        c.mu = MuChoice::parse(root["mu"].as<std::string>());
    read(root, "gap_min_width", c.gap_min_width, "config");
    read(root, "tau", c.tau, "config");
    if (!(c.gap_min_width > 0.0))
        throw ValidationError("bad_value", "gap_min_width must be positive");

    if (root["analyses"]) {
        if (!root["analyses"].IsSequence())
            throw ValidationError("bad_config", "analyses must be a list");
        for (const auto& a : root["analyses"]) {
            const Analysis an = analysis_from_string(a.as<std::string>());
            if (std::find(c.analyses.begin(), c.analyses.end(), an) == c.analyses.end())
                c.analyses.push_back(an);
        }
    }

    if (root["edge"]) {
        const YAML::Node e = root["edge"];
        check_keys(e, "edge", {"extent_x1", "extent_x2", "bc_x1", "switch_fraction",
                               "window_half_width", "tau", "perturbation"});
        read(e, "extent_x1", c.edge.extent_x1, "edge");
        read(e, "extent_x2", c.edge.extent_x2, "edge");
        c.edge.bc_x1 = read_boundary(e, "bc_x1", c.edge.bc_x1);
        read(e, "switch_fraction", c.edge.switch_fraction, "edge");
        if (e["window_half_width"])
            c.edge.window_half_width = e["window_half_width"].as<int>();
        read(e, "tau", c.edge.tau, "edge");
        if (e["perturbation"]) {
            const YAML::Node pt = e["perturbation"];
            check_keys(pt, "edge.perturbation", {"amplitude", "xi_prime", "seed"});
            read(pt, "amplitude", c.edge.perturbation_amplitude, "edge.perturbation");
            read(pt, "xi_prime", c.edge.perturbation_xi_prime, "edge.perturbation");
            read(pt, "seed", c.edge.perturbation_seed, "edge.perturbation");
        }
        if (!(c.edge.switch_fraction > 0.0 && c.edge.switch_fraction < 1.0))
            throw ValidationError("bad_value", "edge.switch_fraction must lie in (0, 1)");
    }
    if (root["spectrum"]) {
        const YAML::Node s = root["spectrum"];
        check_keys(s, "spectrum", {"extent_x2", "k_points", "localization_length", "eps_fraction"});
        read(s, "extent_x2", c.spectrum.extent_x2, "spectrum");
        read(s, "k_points", c.spectrum.k_points, "spectrum");
        read(s, "localization_length", c.spectrum.localization_length, "spectrum");
        read(s, "eps_fraction", c.spectrum.eps_fraction, "spectrum");
        require_positive(c.spectrum.k_points, "spectrum.k_points");
    }
    if (root["transport"]) {
        const YAML::Node t = root["transport"];
        check_keys(t, "transport", {"extent_x1", "extent_x2", "t_max", "steps",
                                    "localization_length", "eps_fraction"});
        read(t, "extent_x1", c.transport.extent_x1, "transport");
        read(t, "extent_x2", c.transport.extent_x2, "transport");
        read(t, "t_max", c.transport.t_max, "transport");
        read(t, "steps", c.transport.steps, "transport");
        read(t, "localization_length", c.transport.localization_length, "transport");
        read(t, "eps_fraction", c.transport.eps_fraction, "transport");
        if (c.transport.steps < 2 || !(c.transport.t_max > 0.0))
            throw ValidationError("bad_value", "transport needs steps >= 2 and t_max > 0");
    }
    if (root["mapping"]) {
        const YAML::Node m = root["mapping"];
        check_keys(m, "mapping", {"matrices", "dim", "seed", "arcs", "states", "eps_fraction"});
        read(m, "matrices", c.mapping.matrices, "mapping");
        read(m, "dim", c.mapping.dim, "mapping");
        read(m, "seed", c.mapping.seed, "mapping");
        read(m, "arcs", c.mapping.arcs, "mapping");
        read(m, "states", c.mapping.states, "mapping");
        read(m, "eps_fraction", c.mapping.eps_fraction, "mapping");
        require_positive(c.mapping.matrices, "mapping.matrices");
        require_positive(c.mapping.dim, "mapping.dim");
    }
    if (root["sweep"]) {
        const YAML::Node s = root["sweep"];
        check_keys(s, "sweep", {"flux", "disorder", "mu"});
        if (s.size() == 0)
            throw ValidationError("empty_sweep_axis", "sweep needs at least one axis");
        SweepAxes axes;
        for (const char* key : {"flux", "disorder", "mu"})
            if (s[key] && !s[key].IsSequence())
                throw ValidationError("bad_config", std::string("sweep.") + key + " must be a list");
        if (s["flux"])
            for (const auto& f : s["flux"])
                axes.flux.push_back(Flux::parse(f.as<std::string>()));
        else
            axes.flux.push_back(c.model.flux);
        if (s["disorder"])
            for (const auto& d : s["disorder"])
                axes.disorder.push_back(d.as<double>());
        else
            axes.disorder.push_back(c.model.disorder_strength);
        if (s["mu"])
            for (const auto& m : s["mu"])
                axes.mu.push_back(MuChoice::parse(m.as<std::string>()));
        else
            axes.mu.push_back(c.mu);
        if (axes.flux.empty() || axes.disorder.empty() || axes.mu.empty())
            throw ValidationError("empty_sweep_axis", "sweep axes must be nonempty");
        c.sweep = axes;
    }
    if (root["output_dir"])
        c.output_dir = root["output_dir"].as<std::string>();
    read(root, "cache", c.cache, "config");
    if (root["cache_dir"])
        c.cache_dir = std::filesystem::path(root["cache_dir"].as<std::string>());
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config_not_found", "cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace edgelab
