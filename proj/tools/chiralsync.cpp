// chiralsync command line: simulate, reproduce, predict, validate.
#include "chiralsync/errors.hpp"
#include "chiralsync/io.hpp"
#include "chiralsync/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cs = chiralsync;

namespace {

struct Common {
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "RNG seed (random networks)");
    sub->add_flag("--quiet", c.quiet, "suppress progress output");
}

int simulate(const std::string& file, const Common& c) {
    auto s = cs::load_scenario(file);
    if (!c.out.empty()) s.output_dir = c.out;
    if (c.seed) s.seed = c.seed;
    if (s.output_dir.empty()) s.output_dir = s.name;
    const auto r = cs::run_scenario(s);
    if (!c.quiet) {
        std::cout << "scenario " << r.scenario_name << " (" << r.scenario_hash << ") finished in "
                  << cs::format_double(r.wall_seconds) << " s\n";
        for (const auto& f : r.files) std::cout << "  " << f << '\n';
    }
    return 0;
}

int reproduce(int id, const Common& c) {
    const auto files = cs::reproduce_figure(id, c.out.empty() ? "figures" : c.out, c.seed, c.quiet);
    if (!c.quiet)
        for (const auto& f : files) std::cout << "  " << f << '\n';
    return 0;
}

int predict(const std::string& file, const Common& c) {
    const auto net = cs::load_network(file);
    cs::require_valid(net);
    const auto dec = cs::spectral_analysis(cs::assemble_drift(net));
    const auto pred = cs::predict_clusters(dec);
    const auto text = cs::clusters_to_json(pred);
    if (!c.out.empty()) {
        cs::write_text(std::filesystem::path(c.out) / "spectral.json", cs::spectral_to_json(dec));
        cs::write_text(std::filesystem::path(c.out) / "clusters.json", text);
    }
    if (!c.quiet) std::cout << text;
    return 0;
}

int validate(const std::string& file, const Common& c) {
    const auto net = cs::load_network(file);
    const auto rep = cs::validate_network(net);
    if (!c.quiet) std::cout << rep.summary() << '\n';
    return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synchronisation and quantum correlations in chiral oscillator networks"};
    app.require_subcommand(1);

    Common common;
    std::string path;
    int figure = 0;

    auto* sim = app.add_subcommand("simulate", "run a scenario file");
    sim->add_option("scenario", path, "scenario JSON")->required();
    add_common(sim, common);

    auto* rep = app.add_subcommand("reproduce", "write plot data for a figure");
    rep->add_option("figure", figure, "figure id (2..8)")->required();
    add_common(rep, common);

    auto* pre = app.add_subcommand("predict", "spectral cluster prediction for a network");
    pre->add_option("network", path, "network JSON")->required();
    add_common(pre, common);

    auto* val = app.add_subcommand("validate", "check a network file");
    val->add_option("network", path, "network JSON")->required();
    add_common(val, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*sim) return simulate(path, common);
        if (*rep) return reproduce(figure, common);
        if (*pre) return predict(path, common);
        return validate(path, common);
    } catch (const cs::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    } catch (const cs::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
