// jchsim — polariton dynamics in the trapped-ion Jaynes-Cummings-Hubbard model.
//
// Subcommands: spectrum, evolve, leakage, sweep, compare, hopping-rate.
// Each run writes a CSV plus a <out>.manifest.json with every resolved
// parameter; rerunning from the manifest's config reproduces the CSV byte
// for byte.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "jch/run.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw jch::IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trapped-ion Jaynes-Cummings-Hubbard polariton simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "out.csv";
    std::int64_t seed = -1;
    int shots = -1;
    int workers = -1;
    bool noiseless = false;

    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "output CSV path");
    app.add_option("--seed", seed, "override the noise RNG seed");
    app.add_option("--shots", shots, "override the Monte Carlo shot count");
    app.add_option("--workers", workers, "worker threads (default: machine parallelism)");
    app.add_flag("--noiseless", noiseless, "disable the noise ensemble");

    for (const char* name :
         {"spectrum", "evolve", "leakage", "sweep", "compare", "hopping-rate"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);

    jch::RunConfig cfg;
    try {
        cfg = config_path.empty() ? jch::RunConfig{}
                                  : jch::parse_config(read_file(config_path));
    } catch (const jch::IoError& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return 3;
    } catch (const jch::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    if (seed >= 0) cfg.noise.seed = static_cast<std::uint64_t>(seed);
    if (shots >= 0) cfg.noise.shots = shots;
    if (workers >= 0) cfg.workers = workers;
    if (noiseless) cfg.noiseless = true;

    const std::string cmd_name = app.get_subcommands().front()->get_name();
    return jch::run_command_exit_code(jch::command_from_name(cmd_name), cfg, out_path,
                                      std::cout, std::cerr);
}
