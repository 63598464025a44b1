// Command-line front end: simulate | reconstruct | analyze | sweep | selftest.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "heraldsim/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Config file (flat key=value lines)");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "RNG seed (overrides the config)");
    cmd->add_option("--set", opts.overrides, "Override a config key (key=value, repeatable)");
}

heraldsim::RunConfig load_config(const CommonOptions& opts) {
    heraldsim::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = heraldsim::RunConfig::from_file(opts.config_path);
    for (const auto& entry : opts.overrides) {
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw heraldsim::config_error("--set expects key=value, got '" + entry + "'");
        cfg.apply_override(entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (!opts.seed.empty()) cfg.apply_override("seed", opts.seed);
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heralded quantum-optical state simulator and homodyne tomography pipeline"};
    app.require_subcommand(1);

    CommonOptions sim_opts, rec_opts, ana_opts, sweep_opts;
    std::string dataset_path, vacuum_path, rho_path, thetas_arg, fault;

    CLI::App* sim = app.add_subcommand("simulate", "Simulate a heralded acquisition run");
    add_common(sim, sim_opts);

    CLI::App* rec = app.add_subcommand("reconstruct", "Reconstruct a density matrix from a dataset");
    rec->add_option("dataset", dataset_path, "Signal dataset file")->required();
    rec->add_option("--vacuum", vacuum_path, "Vacuum calibration file (default: sibling vacuum.dat)");
    add_common(rec, rec_opts);

    CLI::App* ana = app.add_subcommand("analyze", "Analyze a reconstructed density matrix");
    ana->add_option("rho", rho_path, "Reconstruction file")->required();
    add_common(ana, ana_opts);

    CLI::App* swp = app.add_subcommand("sweep", "Run the full pipeline across a list of HWP angles");
    swp->add_option("--thetas", thetas_arg,
                    "Comma-separated angles (radians, or degrees with a 'deg' suffix)");
    add_common(swp, sweep_opts);

    CLI::App* self = app.add_subcommand("selftest", "Run the fast invariant suite");
    self->add_option("--inject-fault", fault, "Corrupt an internal path (testing the tests)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) return app.exit(err);  // --help
        std::cerr << "error: config: " << err.what() << "\n";
        return kExitConfig;
    }

    try {
        if (sim->parsed()) {
            heraldsim::RunConfig cfg = load_config(sim_opts);
            auto art = heraldsim::run_simulate(cfg, cfg.output_dir);
            std::cout << "wrote " << art.signal_file.string() << "\n";
            std::cout << "wrote " << art.vacuum_file.string() << "\n";
            std::cout << "wrote " << art.manifest_file.string() << "\n";
            std::cout << "herald_probability=" << art.herald_probability << "\n";
        } else if (rec->parsed()) {
            heraldsim::RunConfig cfg = load_config(rec_opts);
            std::filesystem::path signal(dataset_path);
            std::filesystem::path vacuum =
                vacuum_path.empty() ? signal.parent_path() / "vacuum.dat"
                                    : std::filesystem::path(vacuum_path);
            auto art = heraldsim::run_reconstruct(signal, vacuum, cfg, cfg.output_dir);
            std::cout << "wrote " << art.rho_file.string() << "\n";
            std::cout << "wrote " << art.diagnostics_file.string() << "\n";
            std::cout << "iterations=" << art.state.iterations_used << "\n";
        } else if (ana->parsed()) {
            heraldsim::RunConfig cfg = load_config(ana_opts);
            auto art = heraldsim::run_analyze(rho_path, cfg.output_dir);
            std::cout << "wrote " << art.report_file.string() << "\n";
            std::cout << "eta_single=" << art.report.eta_single << "\n";
            std::cout << "squeezing_db=" << art.report.squeezing_db << "\n";
        } else if (swp->parsed()) {
            heraldsim::RunConfig cfg = load_config(sweep_opts);
            heraldsim::SweepSpec spec;
            spec.base = cfg;
            spec.thetas = cfg.sweep_thetas;
            if (!thetas_arg.empty()) {
                spec.thetas.clear();
                std::stringstream ss(thetas_arg);
                std::string item;
                while (std::getline(ss, item, ','))
                    spec.thetas.push_back(heraldsim::parse_angle(item, "thetas"));
            }
            int failures = heraldsim::run_sweep(spec, cfg.output_dir);
            std::cout << "wrote " << (std::filesystem::path(cfg.output_dir) / "summary.csv").string()
                      << "\n";
            if (failures > 0) {
                std::cerr << "error: numeric: " << failures << " sweep point(s) failed\n";
                return kExitNumeric;
            }
        } else if (self->parsed()) {
            bool ok = heraldsim::run_selftest(std::cout, fault);
            if (!ok) {
                std::cerr << "error: numeric: selftest failed\n";
                return kExitNumeric;
            }
        }
    } catch (const heraldsim::config_error& err) {
        std::cerr << "error: config: " << err.what() << "\n";
        return kExitConfig;
    } catch (const heraldsim::data_error& err) {
        std::cerr << "error: data: " << err.what() << "\n";
        return kExitData;
    } catch (const heraldsim::numeric_error& err) {
        std::cerr << "error: numeric: " << err.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& err) {
        std::cerr << "error: numeric: " << err.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
