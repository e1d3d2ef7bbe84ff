// Command line front end: every subcommand maps to one experiment kind.
#include "zdirac/errors.hpp"
#include "zdirac/io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

namespace {

namespace fs = std::filesystem;
using zdirac::io::json;

const char* kEnvRoot = "ZDIRAC_OUTPUT_ROOT";

// flag name -> config key
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"m", "model.m"},
    {"gamma", "model.gamma"},
    {"Gamma2", "model.Gamma2"},
    {"Gamma3", "model.Gamma3"},
    {"v1", "model.v1"},
    {"L", "numerics.L"},
    {"boundary", "numerics.boundary"},
    {"sign", "numerics.sign"},
    {"lambda0", "numerics.lambda0"},
    {"j-first", "numerics.j_first"},
    {"j-last", "numerics.j_last"},
    {"lambda-min", "numerics.lambda_min"},
    {"lambda-max", "numerics.lambda_max"},
    {"n-lambda", "numerics.n_lambda"},
    {"fit-lo", "numerics.fit_lo"},
    {"fit-hi", "numerics.fit_hi"},
    {"series", "numerics.series"},
    {"M", "numerics.M"},
    {"N", "numerics.N"},
    {"quad-order", "numerics.quad_order"},
    {"quad-levels", "numerics.quad_levels"},
    {"seed", "run.seed"},
    {"out", "output.dir"},
    {"formats", "output.formats"},
};

std::string resolve_out(const std::string& dir) {
    const char* root = std::getenv(kEnvRoot);
    if (!root || !*root || fs::path(dir).is_absolute()) return dir;
    return (fs::path(root) / dir).string();
}

void failure_manifest(const std::string& dir, const std::string& command, const std::string& msg) {
    try {
        fs::create_directories(dir);
        zdirac::io::write_json(json{{"version", zdirac::io::version},
                                    {"config", {{"run", {{"command", command}}}}},
                                    {"status", 2},
                                    {"artifacts", json::array()},
                                    {"warnings", json::array()},
                                    {"error", msg}},
                               (fs::path(dir) / "manifest.json").string());
    } catch (const std::exception&) {
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dirac-type lattice operator experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;
    bool quiet = false;

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"bands", "band functions on a grid and the coarea density"},
        {"thresholds", "critical values and their kinds"},
        {"flatband", "flat band multiplicity and loop residuals"},
        {"count", "eigenvalue counts in the gap above -m"},
        {"ssf", "finite volume spectral shift"},
        {"fit", "power law fit of the counting function"},
        {"constant", "asymptotic accumulation constant"},
        {"toroidal", "counting for the truncated toroidal operator"},
        {"validate", "quick self checks"},
    };
    for (const auto& [name, help] : subs) {
        auto* sc = app.add_subcommand(name, help);
        sc->add_option("-c,--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
        sc->add_option("--set", sets, "override a config key, e.g. --set model.m=0.5");
        sc->add_flag("-q,--quiet", quiet, "only print errors");
        for (const auto& [flag, key] : kFlags) sc->add_option("--" + flag, values[key], "sets " + key);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    boost::property_tree::ptree tree;
    std::string out_guess = "out";
    try {
        if (!config_path.empty()) tree = zdirac::io::read_config_tree(config_path);
        for (const auto& [key, v] : values)
            if (!v.empty()) tree.put(key, v);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos || eq == 0) throw zdirac::ConfigError(s, "expected key=value");
            tree.put(s.substr(0, eq), s.substr(eq + 1));
        }
        tree.put("run.command", command);
        out_guess = tree.get<std::string>("output.dir", out_guess);
        auto cfg = zdirac::io::parse_config(tree);
        cfg.out_dir = resolve_out(cfg.out_dir);

        const auto rep = zdirac::io::run_experiment(cfg);
        if (!quiet) {
            for (const auto& a : rep.artifacts) std::cout << (fs::path(cfg.out_dir) / a).string() << "\n";
            std::cout << (fs::path(cfg.out_dir) / "manifest.json").string() << "\n";
        }
        for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
        if (!rep.error.empty()) std::cerr << "error: " << rep.error << "\n";
        return rep.status;
    } catch (const zdirac::ConfigError& e) {
        std::cerr << "config error at " << e.field << ": " << e.what() << "\n";
        failure_manifest(resolve_out(out_guess), command, e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        failure_manifest(resolve_out(out_guess), command, e.what());
        return 2;
    }
}
