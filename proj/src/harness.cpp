#include "edgelab/harness.hpp"

#include "edgelab/diagnostics.hpp"
#include "edgelab/indices.hpp"
#include "edgelab/report_json.hpp"
#include "edgelab/serialization.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace edgelab {

namespace fs = std::filesystem;

BulkGap resolve_bulk_gap(const ModelSpec& spec, const LatticePatch& patch, const MuChoice& mu,
                         double min_width) {
    BulkGap b;
    const int q = spec.kind == ModelKind::hofstadter ? int(spec.flux.q) : 1;
    const int e2 = (patch.extent_x2() + q - 1) / q * q;
    b.torus = LatticePatch(patch.extent_x1(), e2, Boundary::periodic, Boundary::periodic);
    b.gaps = gap_detect(eigh(build_model(b.torus, spec)), min_width);
    if (mu.value) {
        b.mu = *mu.value;
        for (const Interval& g : b.gaps)
            if (g.contains(b.mu)) {
                b.gap = g;
                return b;
            }
        throw ValidationError("mu_not_in_gap", "mu not in gap");
    }
    if (mu.gap_number > int(b.gaps.size()))
        throw ValidationError("mu_not_in_gap", "mu not in gap: the bulk has only " +
                                                   std::to_string(b.gaps.size()) + " gap(s)");
    b.gap = b.gaps[std::size_t(mu.gap_number - 1)];
    b.mu = b.gap.center();
    return b;
}

LatticePatch edge_patch(const EdgeSection& edge) {
    return build_patch(edge.extent_x1, edge.extent_x2, edge.bc_x1, Boundary::open);
}

HermitianOperator edge_hamiltonian(const ModelSpec& spec, const EdgeSection& edge) {
    HermitianOperator h = build_model(edge_patch(edge), spec);
    if (edge.perturbation_amplitude > 0.0)
        h = edge_perturbation(h, edge.perturbation_amplitude, edge.perturbation_xi_prime,
                              edge.perturbation_seed);
    return h;
}

RunConfig apply_options(RunConfig cfg, const RunOptions& options) {
    if (options.seed_override)
        cfg.model.rng_seed = *options.seed_override;
    if (options.out)
        cfg.output_dir = *options.out;
    if (options.no_cache)
        cfg.cache = false;
    return cfg;
}

namespace {

struct Artifact {
    std::string name;
    std::string content;
};

struct TaskOutput {
    TaskOutput(std::vector<Artifact> f = {}) : files(std::move(f)) {}

    std::vector<Artifact> files;
    ExitCode code = ExitCode::ok;
    std::string reason;
};

std::string dump(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

nlohmann::json header(const RunConfig& cfg, const std::string& analysis) {
    return {{"analysis", analysis}, {"model", to_json(cfg.model)}, {"version", tool_version}};
}

nlohmann::json gap_json(const BulkGap& b) {
    auto gaps = nlohmann::json::array();
    for (const Interval& g : b.gaps)
        gaps.push_back(to_json(g));
    return {{"mu", number(b.mu)}, {"gap", to_json(b.gap)}, {"torus", to_json(b.torus)},
            {"torus_gaps", gaps}};
}

EdgeIndexConfig edge_config(const RunConfig& cfg, const LatticePatch& patch, const BulkGap& b) {
    EdgeIndexConfig ec = default_edge_config(patch, b.mu, b.gap, cfg.edge.switch_fraction);
    if (cfg.edge.window_half_width)
        ec.window_half_width = *cfg.edge.window_half_width;
    ec.tau = cfg.edge.tau;
    return ec;
}

IndexResult compute_bulk(const RunConfig& cfg, const ModelSpec& spec, const BulkGap& b) {
    if (cfg.patch.bc_x1() != Boundary::open || cfg.patch.bc_x2() != Boundary::open)
        throw ValidationError("periodic_patch", "bulk index needs an open patch");
    BulkIndexOptions opts;
    opts.tau = cfg.tau;
    return bulk_index(build_model(cfg.patch, spec), b.mu, b.gap, opts);
}

EdgeIndexResult compute_edge(const RunConfig& cfg, const ModelSpec& spec, const BulkGap& b) {
    const HermitianOperator h = edge_hamiltonian(spec, cfg.edge);
    return edge_index(h, edge_config(cfg, h.patch(), b));
}

LatticePatch spectrum_cylinder(int extent_x2) {
    return build_patch(2, extent_x2, Boundary::periodic, Boundary::open);
}

TaskOutput task_bulk(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const IndexResult r = compute_bulk(cfg, cfg.model, b);
    nlohmann::json j = header(cfg, "bulk_index");
    j["patch"] = to_json(cfg.patch);
    j["bulk"] = gap_json(b);
    j["result"] = to_json(r, true);
    TaskOutput out{{{"bulk_index.json", dump(j)}}};
    if (!r.index) {
        out.code = ExitCode::inconclusive;
        out.reason = "inconclusive_index";
    }
    return out;
}

TaskOutput task_edge(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const EdgeIndexResult r = compute_edge(cfg, cfg.model, b);
    nlohmann::json j = header(cfg, "edge_index");
    j["patch"] = to_json(edge_patch(cfg.edge));
    j["bulk"] = gap_json(b);
    j["result"] = to_json(r, true);
    TaskOutput out{{{"edge_index.json", dump(j)}}};
    if (!r.index) {
        out.code = ExitCode::inconclusive;
        out.reason = "inconclusive_index";
    }
    return out;
}

TaskOutput task_correspondence(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const IndexResult bulk = compute_bulk(cfg, cfg.model, b);
    const EdgeIndexResult edge = compute_edge(cfg, cfg.model, b);
    nlohmann::json j = header(cfg, "correspondence");
    j["bulk"] = gap_json(b);
    j["bulk_index"] = to_json(bulk);
    j["edge_index"] = to_json(edge);
    const bool conclusive = bulk.index && edge.index;
    j["match"] = conclusive ? nlohmann::json(*bulk.index == *edge.index) : nlohmann::json(nullptr);
    if (cfg.model.disorder_strength == 0.0) {
        const EdgeSpectrumReport bands =
            edge_spectrum(cfg.model, spectrum_cylinder(cfg.edge.extent_x2), cfg.spectrum.k_points,
                          b.gap, cfg.spectrum.localization_length);
        j["spectral_flow"] = to_json(spectral_flow(bands, b.mu));
    }
    TaskOutput out{{{"correspondence.json", dump(j)}}};
    if (!conclusive) {
        out.code = ExitCode::inconclusive;
        out.reason = "inconclusive_index";
    }
    return out;
}

TaskOutput task_edge_spectrum(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const LatticePatch cyl = spectrum_cylinder(cfg.spectrum.extent_x2);
    const int ell = cfg.spectrum.localization_length;
    const EdgeSpectrumReport bands = edge_spectrum(cfg.model, cyl, cfg.spectrum.k_points, b.gap, ell);
    const EdgeSpectrumReport fine =
        edge_spectrum(cfg.model, cyl, 2 * cfg.spectrum.k_points, b.gap, ell);
    const double eps = cfg.spectrum.eps_fraction * b.gap.width();
    const Interval shrunk{b.gap.lo + eps, b.gap.hi - eps};

    int in_gap_edge_states = 0;
    for (Index k = 0; k < bands.bands.rows(); ++k)
        for (Index n = 0; n < bands.band_count(); ++n)
            if (b.gap.contains(bands.bands(k, n)) && bands.edge_weight(k, n) >= 0.5)
                ++in_gap_edge_states;

    nlohmann::json j = header(cfg, "edge_spectrum");
    j["cylinder"] = to_json(cyl);
    j["bulk"] = gap_json(b);
    j["k_points"] = cfg.spectrum.k_points;
    j["band_count"] = bands.band_count();
    j["shrunk_gap"] = to_json(shrunk);
    j["in_gap_edge_states"] = in_gap_edge_states;
    j["coverage"] = number(gap_coverage(bands, shrunk));
    j["coverage_refined"] = number(gap_coverage(fine, shrunk));
    j["coverage_threshold"] = number(b.gap.width() / 20.0);
    j["spectral_flow"] = to_json(spectral_flow(bands, b.mu));

    std::ostringstream csv;
    write_bands_csv(csv, bands);
    return {{{"edge_spectrum.json", dump(j)}, {"bands.csv", csv.str()}}};
}

TaskOutput task_transport(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const TransportSection& t = cfg.transport;
    const LatticePatch cyl = build_patch(t.extent_x1, t.extent_x2, Boundary::periodic, Boundary::open);
    const HermitianOperator h = build_model(cyl, cfg.model);
    const Site x0{cyl.first_x1() + t.extent_x1 / 2 - 1, cyl.first_x2()};
    std::vector<double> times;
    for (int i = 0; i < t.steps; ++i)
        times.push_back(t.t_max * i / (t.steps - 1));
    TransportOptions opts;
    opts.eps_fraction = t.eps_fraction;
    opts.localization_length = t.localization_length;
    const TransportTrace trace = transport_spread(h, b.gap, x0, times, opts);

    nlohmann::json j = header(cfg, "transport");
    j["cylinder"] = to_json(cyl);
    j["bulk"] = gap_json(b);
    j["x0"] = {x0.x1, x0.x2};
    j["result"] = to_json(trace);
    std::ostringstream csv;
    write_transport_csv(csv, trace);
    return {{{"transport.json", dump(j)}, {"transport.csv", csv.str()}}};
}

Eigen::MatrixXcd random_hermitian(Index n, UniformStream& rng) {
    Eigen::MatrixXcd x(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            x(i, j) = cplx(rng.symmetric(1.0), rng.symmetric(1.0));
    // semicircle radius about 3
    const double scale = 3.0 / (2.0 * std::sqrt(n / 3.0));
    return 0.5 * scale * (x + x.adjoint());
}

/// Switch functions exercised by the mapping checks: the configured gap with
/// the default and the edge-index half-widths, and a wide generic one.
std::vector<std::pair<SwitchFunction, Interval>> shipped_switches(const BulkGap& b,
                                                                 double edge_fraction) {
    const Interval generic{-2.0, 2.0};
    return {
        {make_switch(b.mu, b.gap), b.gap},
        {make_switch(b.mu, b.gap, default_half_width(b.mu, b.gap, edge_fraction)), b.gap},
        {make_switch(0.0, generic, 1.8), generic},
    };
}

TaskOutput task_mapping(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const auto switches = shipped_switches(b, cfg.edge.switch_fraction);
    const MappingSection& m = cfg.mapping;

    UniformStream rng(m.seed);
    double eig_dev = 0.0, measure_dev = 0.0, windowed_dev = 0.0;
    bool all_bijective = true;
    int windowed_checked = 0, windowed_skipped = 0;
    // the windowed bijection is only claimed where W_g is invertible on Delta_eps
    const auto tally = [&](const WindowedMappingReport& w) {
        if (!w.injective) {
            ++windowed_skipped;
            return;
        }
        ++windowed_checked;
        all_bijective = all_bijective && w.bijection;
        windowed_dev = std::max(windowed_dev, w.max_deviation);
    };
    auto rows = nlohmann::json::array();
    for (int i = 0; i < m.matrices; ++i) {
        const Eigen::MatrixXcd a = random_hermitian(m.dim, rng);
        for (std::size_t s = 0; s < switches.size(); ++s) {
            const auto& [g, gap] = switches[s];
            const MappingReport r =
                verify_spectral_mapping(a, g, m.seed * 1000003ULL + i * 31ULL + s, m.arcs, m.states);
            const WindowedMappingReport w =
                verify_windowed_mapping(a, g, gap, m.eps_fraction * gap.width());
            eig_dev = std::max(eig_dev, r.eigenvalue_deviation);
            measure_dev = std::max(measure_dev, r.measure_deviation);
            tally(w);
            rows.push_back({{"matrix", i}, {"switch", s}, {"pushforward", to_json(r)},
                            {"windowed", to_json(w)}});
        }
    }

    auto edge_rows = nlohmann::json::array();
    const HermitianOperator h = edge_hamiltonian(cfg.model, cfg.edge);
    for (std::size_t s = 0; s + 1 < switches.size(); ++s) {
        const auto& [g, gap] = switches[s];
        const WindowedMappingReport w =
            verify_windowed_mapping(h.matrix(), g, gap, m.eps_fraction * gap.width());
        tally(w);
        edge_rows.push_back({{"switch", s}, {"windowed", to_json(w)}});
    }

    nlohmann::json j = header(cfg, "mapping_checks");
    j["bulk"] = gap_json(b);
    j["max_eigenvalue_deviation"] = number(eig_dev);
    j["max_measure_deviation"] = number(measure_dev);
    j["max_windowed_deviation"] = number(windowed_dev);
    j["all_bijective"] = all_bijective;
    j["windowed_checked"] = windowed_checked;
    j["windowed_not_injective"] = windowed_skipped;
    j["random"] = rows;
    j["edge"] = edge_rows;
    return {{{"mapping.json", dump(j)}}};
}

std::string singular_values_csv(const CommutatorReport& r) {
    std::ostringstream os;
    os << "k,sigma,partial_sum\n";
    for (std::size_t k = 0; k < r.singular_values.size(); ++k)
        os << k + 1 << ',' << format_double(r.singular_values[k]) << ','
           << format_double(r.partial_sums[k]) << '\n';
    return os.str();
}

std::string decay_csv(const DecayFitReport& f) {
    std::ostringstream os;
    write_decay_csv(os, f);
    return os.str();
}

TaskOutput task_locality(const RunConfig& cfg) {
    const BulkGap b = resolve_bulk_gap(cfg.model, cfg.patch, cfg.mu, cfg.gap_min_width);
    const DecayFitReport h_fit = check_locality(build_model(cfg.patch, cfg.model));

    const HermitianOperator torus = build_model(b.torus, cfg.model);
    const SwitchFunction g = make_switch(b.mu, b.gap);
    const DecayFitReport g_fit = check_locality(
        apply_function(eigh(torus), [&g](double x) { return cplx(g(x)); }), b.torus);

    const HermitianOperator dirichlet = build_model(edge_patch(cfg.edge), cfg.model);
    const HermitianOperator perturbed = edge_hamiltonian(cfg.model, cfg.edge);
    const BoundaryDecayReport boundary =
        boundary_decay(dirichlet, perturbed, cfg.edge.perturbation_xi_prime);

    const auto commutator = [&](const EdgeSection& section) {
        const HermitianOperator h = edge_hamiltonian(cfg.model, section);
        const EdgeIndexConfig ec = edge_config(cfg, h.patch(), b);
        return commutator_decay(edge_unitary(eigh(h), ec.g), h.patch());
    };
    const CommutatorReport small = commutator(cfg.edge);
    EdgeSection larger = cfg.edge;
    larger.extent_x1 = cfg.edge.extent_x1 * 3 / 2;
    const CommutatorReport large = commutator(larger);
    const double ratio_gap = small.nuclear_norm > 0.0
                                 ? std::abs(large.nuclear_norm - small.nuclear_norm) / small.nuclear_norm
                                 : 0.0;

    nlohmann::json j = header(cfg, "locality_checks");
    j["bulk"] = gap_json(b);
    j["hamiltonian"] = to_json(h_fit);
    j["smooth_function"] = to_json(g_fit);
    j["boundary"] = to_json(boundary);
    j["commutator"] = to_json(small);
    j["commutator_large"] = to_json(large);
    j["commutator_extents_x1"] = {cfg.edge.extent_x1, larger.extent_x1};
    j["nuclear_norm_relative_change"] = number(ratio_gap);
    return {{{"locality.json", dump(j)},
             {"locality_decay.csv", decay_csv(h_fit)},
             {"smooth_decay.csv", decay_csv(g_fit)},
             {"boundary_decay.csv", decay_csv(boundary.fit)},
             {"commutator_decay.csv", decay_csv(small.decay)},
             {"commutator_singular_values.csv", singular_values_csv(small)},
             {"commutator_singular_values_large.csv", singular_values_csv(large)}}};
}

struct SweepRow {
    Flux flux;
    double disorder = 0.0;
    MuChoice mu_choice;
    std::optional<BulkGap> gap;
    std::optional<int> ind_b, ind_e;
    double residual_b = NAN, residual_e = NAN;
    std::string status = "ok";
};

SweepRow sweep_point(const RunConfig& cfg, Flux flux, double disorder, const MuChoice& mu) {
    SweepRow row;
    row.flux = flux;
    row.disorder = disorder;
    row.mu_choice = mu;
    ModelSpec spec = cfg.model;
    spec.flux = flux;
    spec.disorder_strength = disorder;
    try {
        row.gap = resolve_bulk_gap(spec, cfg.patch, mu, cfg.gap_min_width);
        const IndexResult bulk = compute_bulk(cfg, spec, *row.gap);
        const EdgeIndexResult edge = compute_edge(cfg, spec, *row.gap);
        row.ind_b = bulk.index;
        row.ind_e = edge.index;
        row.residual_b = bulk.report.residual;
        row.residual_e = edge.report.residual;
        if (!bulk.index || !edge.index)
            row.status = "inconclusive";
    } catch (const Error& e) {
        row.status = e.reason();
    }
    return row;
}

std::string csv_int(const std::optional<int>& v) {
    return v ? std::to_string(*v) : "null";
}

TaskOutput task_sweep(const RunConfig& cfg, int workers) {
    if (!cfg.sweep)
        throw ValidationError("empty_sweep_axis", "config has no sweep axes");
    struct Point {
        Flux flux;
        double disorder;
        MuChoice mu;
    };
    std::vector<Point> points;
    for (const Flux& f : cfg.sweep->flux)
        for (double d : cfg.sweep->disorder)
            for (const MuChoice& m : cfg.sweep->mu)
                points.push_back({f, d, m});

    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++)
            rows[i] = sweep_point(cfg, points[i].flux, points[i].disorder, points[i].mu);
    };
    const int n_threads = std::max(1, std::min<int>(workers, int(points.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    std::ostringstream csv;
    csv << "flux,disorder,mu_choice,mu,gap_lo,gap_hi,Ind_B,Ind_E,match,residual_B,residual_E,status\n";
    int conclusive = 0, matched = 0;
    for (const SweepRow& r : rows) {
        const bool both = r.ind_b && r.ind_e;
        conclusive += both;
        matched += both && *r.ind_b == *r.ind_e;
        const auto num = [](double x) { return std::isfinite(x) ? format_double(x) : "null"; };
        csv << r.flux.str() << ',' << format_double(r.disorder) << ',' << r.mu_choice.str() << ','
            << (r.gap ? num(r.gap->mu) : "null") << ',' << (r.gap ? num(r.gap->gap.lo) : "null")
            << ',' << (r.gap ? num(r.gap->gap.hi) : "null") << ',' << csv_int(r.ind_b) << ','
            << csv_int(r.ind_e) << ','
            << (both ? (*r.ind_b == *r.ind_e ? "true" : "false") : "null") << ','
            << num(r.residual_b) << ',' << num(r.residual_e) << ',' << r.status << '\n';
    }
    nlohmann::json j = header(cfg, "sweep");
    j["points"] = rows.size();
    j["conclusive"] = conclusive;
    j["matched"] = matched;
    j["conclusive_fraction"] = rows.empty() ? 0.0 : double(conclusive) / double(rows.size());
    j["match_rate"] = conclusive ? nlohmann::json(double(matched) / conclusive) : nlohmann::json(nullptr);
    j["summary"] = "match rate " + std::to_string(matched) + "/" + std::to_string(conclusive) +
                   " conclusive, " + std::to_string(conclusive) + "/" +
                   std::to_string(rows.size()) + " points conclusive";
    return {{{"sweep.csv", csv.str()}, {"sweep_summary.json", dump(j)}}};
}

nlohmann::json task_inputs(const RunConfig& cfg, const std::string& task) {
    const nlohmann::json c = cfg.canonical();
    nlohmann::json j{{"version", tool_version}, {"task", task}, {"model", c["model"]},
                     {"patch", c["patch"]}, {"mu", c["mu"]}, {"gap_min_width", c["gap_min_width"]},
                     {"tau", c["tau"]}};
    if (task == "edge_index" || task == "correspondence" || task == "mapping_checks" ||
        task == "locality_checks" || task == "sweep")
        j["edge"] = c["edge"];
    if (task == "correspondence" || task == "edge_spectrum")
        j["spectrum"] = c["spectrum"];
    if (task == "transport")
        j["transport"] = c["transport"];
    if (task == "mapping_checks")
        j["mapping"] = c["mapping"];
    if (task == "sweep")
        j["sweep"] = c["sweep"];
    return j;
}

fs::path default_cache_dir(const fs::path& out) {
    fs::path p = out.lexically_normal();
    if (p.filename().empty())
        p = p.parent_path();
    return p.parent_path() / (p.filename().string() + ".cache");
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << content;
    if (!os)
        throw ValidationError("write_failed", "cannot write " + p.string());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<TaskOutput> cache_load(const fs::path& entry) {
    if (!fs::exists(entry))
        return std::nullopt;
    try {
        const nlohmann::json j = nlohmann::json::parse(read_file(entry));
        TaskOutput out;
        for (const auto& f : j.at("files"))
            out.files.push_back({f.at("name").get<std::string>(), f.at("content").get<std::string>()});
        out.code = ExitCode(j.at("code").get<int>());
        out.reason = j.at("reason").get<std::string>();
        return out;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt; // unreadable entries are recomputed
    }
}

void cache_store(const fs::path& entry, const TaskOutput& out) {
    nlohmann::json j;
    j["files"] = nlohmann::json::array();
    for (const Artifact& a : out.files)
        j["files"].push_back({{"name", a.name}, {"content", a.content}});
    j["code"] = int(out.code);
    j["reason"] = out.reason;
    fs::create_directories(entry.parent_path());
    const fs::path tmp = entry.string() + ".tmp";
    write_file(tmp, j.dump());
    fs::rename(tmp, entry);
}

std::string status_for(ExitCode code) {
    switch (code) {
    case ExitCode::ok:
        return "computed";
    case ExitCode::inconclusive:
        return "inconclusive";
    default:
        return "failed";
    }
}

} // namespace

nlohmann::json RunManifest::to_json() const {
    auto list = nlohmann::json::array();
    auto files = nlohmann::json::array({"manifest.json"});
    for (const AnalysisRecord& a : analyses) {
        list.push_back({{"name", a.name},
                        {"status", a.status},
                        {"reason", a.reason},
                        {"message", a.message},
                        {"artifacts", a.artifacts},
                        {"cached", a.cached},
                        {"exit_code", int(a.code)},
                        {"wall_time_s", a.wall_time}});
        for (const auto& f : a.artifacts)
            files.push_back(f);
    }
    return {{"version", version},
            {"config_hash", config_hash},
            {"exit_code", int(exit_code)},
            {"analyses", list},
            {"files", files}};
}

RunManifest execute(const RunConfig& cfg, const RunOptions& options,
                    const std::vector<std::string>& tasks) {
    using Task = std::function<TaskOutput(const RunConfig&)>;
    const std::map<std::string, Task> table{
        {"bulk_index", task_bulk},
        {"edge_index", task_edge},
        {"correspondence", task_correspondence},
        {"edge_spectrum", task_edge_spectrum},
        {"transport", task_transport},
        {"mapping_checks", task_mapping},
        {"locality_checks", task_locality},
        {"sweep", [&options](const RunConfig& c) { return task_sweep(c, options.workers); }},
    };
    for (const auto& t : tasks)
        if (!table.count(t))
            throw ValidationError("bad_analysis", "unknown analysis '" + t + "'");

    RunManifest m;
    m.output_dir = cfg.output_dir;
    m.config_hash = sha256_hex(cfg.canonical().dump());
    const fs::path cache_dir = cfg.cache_dir ? *cfg.cache_dir : default_cache_dir(cfg.output_dir);
    fs::create_directories(cfg.output_dir);

    std::set<std::string> produced{"manifest.json"};
    for (const auto& task : tasks) {
        AnalysisRecord rec;
        rec.name = task;
        const auto start = std::chrono::steady_clock::now();
        const fs::path entry = cache_dir / (sha256_hex(task_inputs(cfg, task).dump()) + ".json");
        std::optional<TaskOutput> out;
        try {
            if (cfg.cache)
                out = cache_load(entry);
            rec.cached = out.has_value();
            if (!out) {
                out = table.at(task)(cfg);
                if (cfg.cache)
                    cache_store(entry, *out);
            }
            rec.code = out->code;
            rec.reason = out->reason;
            rec.status = rec.cached && out->code == ExitCode::ok ? "cached" : status_for(out->code);
            for (const Artifact& a : out->files) {
                write_file(cfg.output_dir / a.name, a.content);
                rec.artifacts.push_back(a.name);
                produced.insert(a.name);
            }
        } catch (const Error& e) {
            rec.code = e.exit_code();
            rec.reason = e.reason();
            rec.message = e.what();
            rec.status = "failed";
        } catch (const std::exception& e) {
            rec.code = ExitCode::numerical_contract;
            rec.reason = "internal_error";
            rec.message = e.what();
            rec.status = "failed";
        }
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (m.exit_code == ExitCode::ok)
            m.exit_code = rec.code;
        m.analyses.push_back(rec);
    }

    // drop files an earlier manifest listed but this run did not produce
    const fs::path manifest_path = cfg.output_dir / "manifest.json";
    if (fs::exists(manifest_path)) {
        try {
            const auto old = nlohmann::json::parse(read_file(manifest_path));
            for (const auto& f : old.value("files", nlohmann::json::array())) {
                const auto name = f.get<std::string>();
                if (!produced.count(name) && name.find('/') == std::string::npos)
                    fs::remove(cfg.output_dir / name);
            }
        } catch (const nlohmann::json::exception&) {
        }
    }
    write_file(manifest_path, m.to_json().dump(2) + "\n");
    return m;
}

RunManifest run(const RunConfig& cfg, const RunOptions& options) {
    const RunConfig c = apply_options(cfg, options);
    std::vector<std::string> tasks;
    for (Analysis a : c.analyses)
        tasks.push_back(to_string(a));
    if (c.sweep)
        tasks.push_back("sweep");
    if (tasks.empty())
        throw ValidationError("nothing_to_run", "config requests no analyses");
    return execute(c, options, tasks);
}

RunManifest sweep(const RunConfig& cfg, const RunOptions& options) {
    const RunConfig c = apply_options(cfg, options);
    if (!c.sweep)
        throw ValidationError("empty_sweep_axis", "config has no sweep axes");
    return execute(c, options, {"sweep"});
}

} // namespace edgelab
