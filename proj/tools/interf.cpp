// interf: sweeps, figure data, oracle validation and Monte Carlo runs for
// the coherent-state Mach-Zehnder interferometer.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "interf/commands.hpp"

namespace {

using interf::cli::RunConfig;

int dispatch(const std::string &command, const RunConfig &cfg, std::ostream &os) {
    if (command == "interferogram")
        return interf::cli::cmd_interferogram(cfg, os);
    if (command == "sensitivity")
        return interf::cli::cmd_sensitivity(cfg, os);
    if (command == "validate")
        return interf::cli::cmd_validate(cfg, os);
    return interf::cli::cmd_montecarlo(cfg, os);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Coherent-state Mach-Zehnder interferometry: detection schemes, sensitivities, parity readout"};
    app.require_subcommand(1, 1);

    RunConfig cfg;
    std::string scheme = "mu";
    std::string out_path;
    int order = -1;
    int points = 0;

    // common flags live on the top-level app so flat config keys match them
    app.set_config("--config", "", "flat 'key = value' file; keys are long flag names");
    app.add_option("--scheme", scheme, "detection scheme: noon|nu|mu|parity")
        ->check(CLI::IsMember({"noon", "nu", "mu", "parity"}));
    app.add_option("--nbar", cfg.nbar, "mean photon number");
    app.add_option("--order", order, "N00N projector order N (default round(nbar))");
    app.add_option("--phi-min", cfg.phi_min, "sweep start, radians");
    app.add_option("--phi-max", cfg.phi_max, "sweep end, radians");
    app.add_option("--points", points, "number of phase points");
    app.add_option("--tail-tol", cfg.tail_tol, "Poisson tail mass allowed beyond the cutoff");
    app.add_option("--fd-step", cfg.fd_step, "finite-difference step, radians");
    app.add_option("--seed", cfg.seed, "master RNG seed");
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--phi", cfg.phi, "operating phase for montecarlo, radians");
    app.add_option("--shots", cfg.shots, "shots per trial; comma separated list")->delimiter(',');
    app.add_option("--trials", cfg.trials, "trials per shot count");
    app.add_option("--grid-nbar", cfg.grid_nbars, "nbar values of the validation grid")->delimiter(',');
    app.add_flag("--flip-convention", cfg.flip_convention)->group("");

    std::string command;
    for (const char *name : {"interferogram", "sensitivity", "validate", "montecarlo"}) {
        auto *sub = app.add_subcommand(name);
        sub->fallthrough();
        sub->callback([&command, name] { command = name; });
    }
    app.get_subcommand("interferogram")->description("numeric vs closed-form mean over a phase sweep");
    app.get_subcommand("sensitivity")->description("numeric vs closed-form phase variance over a phase sweep");
    app.get_subcommand("validate")->description("oracle agreement and parity identity suites");
    app.get_subcommand("montecarlo")->description("shot-level parity readout and phase estimation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return interf::cli::exit_config_error;
    }

    try {
        cfg.scheme = interf::cli::parse_scheme(scheme);
        if (order >= 0)
            cfg.order = order;
        if (points != 0)
            cfg.points = points;

        if (out_path.empty())
            return dispatch(command, cfg, std::cout);
        std::ofstream file(out_path);
        if (!file)
            throw interf::cli::config_error("cannot open output file " + out_path);
        return dispatch(command, cfg, file);
    } catch (const interf::cli::config_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return interf::cli::exit_config_error;
    } catch (const interf::domain_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return interf::cli::exit_config_error;
    }
}
