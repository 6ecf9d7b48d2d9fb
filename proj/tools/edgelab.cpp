#include "edgelab/config.hpp"
#include "edgelab/errors.hpp"
#include "edgelab/harness.hpp"
#include "edgelab/serialization.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace edgelab;

namespace {

struct Globals {
    std::string config;
    std::string out;
    int workers = 1;
    bool no_cache = false;
    std::optional<std::uint64_t> seed_override;
};

RunOptions options_from(const Globals& g) {
    RunOptions o;
    if (!g.out.empty())
        o.out = g.out;
    o.workers = g.workers;
    o.no_cache = g.no_cache;
    o.seed_override = g.seed_override;
    return o;
}

int report(const RunManifest& m) {
    for (const auto& a : m.analyses) {
        std::cout << a.name << ": " << a.status;
        if (!a.reason.empty())
            std::cout << " (" << a.reason << ")";
        if (!a.message.empty())
            std::cout << " " << a.message;
        std::cout << "\n";
        for (const auto& f : a.artifacts)
            std::cout << "  " << (m.output_dir / f).string() << "\n";
    }
    std::cout << "manifest: " << (m.output_dir / "manifest.json").string() << "\n";
    return int(m.exit_code);
}

int build_model_file(const Globals& g) {
    RunConfig cfg = apply_options(load_config(g.config), {});
    if (g.seed_override)
        cfg.model.rng_seed = *g.seed_override;
    if (g.out.empty())
        throw ValidationError("missing_out", "model build needs --out <file>");
    std::ofstream os(g.out, std::ios::binary | std::ios::trunc);
    os << serialize(build_model(cfg.patch, cfg.model));
    if (!os)
        throw ValidationError("write_failed", "cannot write " + g.out);
    std::cout << g.out << "\n";
    return 0;
}

int run_tasks(const Globals& g, const std::vector<std::string>& tasks) {
    const RunOptions o = options_from(g);
    const RunConfig cfg = apply_options(load_config(g.config), o);
    return report(execute(cfg, o, tasks));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edgelab: bulk and edge indices of 2D lattice Hamiltonians"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory (model build: output file)");
    app.add_option("--workers", g.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
    app.add_flag("--no-cache", g.no_cache, "ignore and do not update the result cache");
    app.add_option("--seed-override", g.seed_override, "replace model.seed");

    std::function<int()> action;
    const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                          std::function<int()> f) {
        parent->add_subcommand(name, help)->callback([&action, f] { action = f; });
    };

    auto* model = app.add_subcommand("model", "model construction")->require_subcommand(1);
    leaf(model, "build", "serialize the model on the configured patch",
         [&] { return build_model_file(g); });

    auto* index = app.add_subcommand("index", "topological indices")->require_subcommand(1);
    leaf(index, "bulk", "bulk index on the open patch", [&] { return run_tasks(g, {"bulk_index"}); });
    leaf(index, "edge", "edge index on the edge patch", [&] { return run_tasks(g, {"edge_index"}); });

    auto* verify = app.add_subcommand("verify", "cross-checks")->require_subcommand(1);
    leaf(verify, "correspondence", "bulk index against edge index",
         [&] { return run_tasks(g, {"correspondence"}); });

    auto* spectrum = app.add_subcommand("spectrum", "band structure")->require_subcommand(1);
    leaf(spectrum, "edge", "momentum-resolved cylinder bands",
         [&] { return run_tasks(g, {"edge_spectrum"}); });

    auto* transport = app.add_subcommand("transport", "wavepacket dynamics")->require_subcommand(1);
    leaf(transport, "run", "gap-filtered edge wavepacket", [&] { return run_tasks(g, {"transport"}); });

    auto* check = app.add_subcommand("check", "analytic ingredients")->require_subcommand(1);
    leaf(check, "mapping", "spectral mapping checks", [&] { return run_tasks(g, {"mapping_checks"}); });
    leaf(check, "locality", "locality and commutator decay",
         [&] { return run_tasks(g, {"locality_checks"}); });

    leaf(&app, "sweep", "parameter sweep of both indices", [&] {
        const RunOptions o = options_from(g);
        return report(sweep(load_config(g.config), o));
    });
    leaf(&app, "run", "every analysis in the config", [&] {
        const RunOptions o = options_from(g);
        return report(run(load_config(g.config), o));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : int(ExitCode::validation);
    }
    try {
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.reason() << ": " << e.what() << "\n";
        return int(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(ExitCode::numerical_contract);
    }
}
