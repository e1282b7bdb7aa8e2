#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "darklattice/commands.hpp"
#include "darklattice/config.hpp"

namespace {

using darklattice::exit_usage_error;
using darklattice::exit_verification_failure;

struct CliFlags {
    std::string config_path;
    int modes = 0;
    int excitation = 0;
    std::vector<double> couplings;
    double omega0 = 0.0;
    std::vector<double> omegas;
    std::string out_dir;
    std::string format;
    std::string frame;
    bool allow_nondegenerate = false;
    // stirap
    double duration = 0.0;
    double amplitude = 0.0;
    std::string schedule;
    // count ranges
    std::string modes_range;
    std::string excitation_range;
};

nlohmann::json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return j;
}

/// Overlay flag values onto the config JSON; flags win. On the `count`
/// subcommand --N/--n carry ranges ("2..4") straight into the count block.
void overlay(nlohmann::json& j, const CLI::App& cmd, const CliFlags& f) {
    auto passed = [&](const std::string& name) {
        const CLI::Option* o = cmd.get_option_no_throw(name);
        return o && o->count() > 0;
    };
    const bool is_count = cmd.get_name() == "count";
    if (is_count) {
        if (passed("--N")) j["count"]["N"] = f.modes_range;
        if (passed("--n")) j["count"]["n"] = f.excitation_range;
    } else {
        if (passed("--N")) j["N"] = f.modes;
        if (passed("--n")) j["n"] = f.excitation;
    }
    if (passed("--g")) j["g"] = f.couplings;
    if (passed("--omega0")) j["omega0"] = f.omega0;
    if (passed("--omegas")) j["omegas"] = f.omegas;
    if (passed("--out")) j["out"] = f.out_dir;
    if (passed("--format")) j["format"] = f.format;
    if (passed("--frame")) j["frame"] = f.frame;
    if (passed("--allow-nondegenerate")) j["allow_nondegenerate"] = true;
    if (passed("--T")) j["stirap"]["T"] = f.duration;
    if (passed("--G")) j["stirap"]["G"] = f.amplitude;
    if (passed("--schedule")) j["stirap"]["schedule"] = f.schedule;
}

/// `count` and `stirap` may run without an explicit model: count synthesizes
/// sweep couplings per grid cell, and stirap builds its two-mode model from
/// the schedule.
void fill_model_defaults(const std::string& command, nlohmann::json& j) {
    if (command == "count") {
        int modes_min = 2;
        if (j.contains("count") && j["count"].contains("N"))
            modes_min = darklattice::detail::parse_range(j["count"]["N"], "count.N").first;
        else if (j.contains("N"))
            modes_min = j["N"].get<int>();
        if (!j.contains("N")) j["N"] = modes_min;
        if (!j.contains("n")) j["n"] = 1;
        if (!j.contains("g")) j["g"] = darklattice::detail::sweep_couplings(j["N"].get<int>());
    } else if (command == "stirap") {
        if (!j.contains("N")) j["N"] = 2;
        if (!j.contains("g")) j["g"] = std::vector<double>{1.0, 0.0};
    }
}

int classify_exception() {
    try {
        throw;
    } catch (const std::invalid_argument&) {
        return exit_usage_error;
    } catch (const std::domain_error&) {
        return exit_usage_error;
    } catch (const std::out_of_range&) {
        return exit_usage_error;
    } catch (const std::length_error&) {
        return exit_usage_error;
    } catch (const std::overflow_error&) {
        return exit_usage_error;
    } catch (const std::filesystem::filesystem_error&) {
        return exit_usage_error;
    } catch (const nlohmann::json::exception&) {
        return exit_usage_error;
    } catch (const std::exception&) {
        return exit_verification_failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fock-state lattice dark-state toolkit for multimode Jaynes-Cummings models"};
    app.require_subcommand(1);

    CliFlags f;
    const std::vector<std::string> command_names = {"basis",     "hamiltonian", "darkstates",
                                                    "count",     "darkmodes",   "stirap",
                                                    "export-graph"};
    const std::map<std::string, std::string> descriptions = {
        {"basis", "list the upper/lower basis states of the subspace"},
        {"hamiltonian", "assemble and dump the arrowhead blocks U, C, L"},
        {"darkstates", "solve the dark-state subspace, verify and serialize it"},
        {"count", "dark-state counting grid: closed formula vs SVD nullity"},
        {"darkmodes", "bright/dark mode transform, matrix B, A = BR check"},
        {"stirap", "two-mode adiabatic transfer simulation"},
        {"export-graph", "render the Fock-state lattice as DOT or JSON"}};

    for (const auto& name : command_names) {
        CLI::App* cmd = app.add_subcommand(name, descriptions.at(name));
        cmd->add_option("--config", f.config_path, "JSON config file (flags win over file values)");
        if (name == "count") {
            cmd->add_option("--N", f.modes_range, "mode range, e.g. 2..4 or 3");
            cmd->add_option("--n", f.excitation_range, "excitation range, e.g. 1..3 or 2");
        } else {
            cmd->add_option("--N", f.modes, "mode count");
            cmd->add_option("--n", f.excitation, "excitation number");
        }
        cmd->add_option("--g", f.couplings, "couplings g1,g2,...")->delimiter(',');
        cmd->add_option("--omega0", f.omega0, "atomic splitting");
        cmd->add_option("--omegas", f.omegas, "mode frequencies")->delimiter(',');
        cmd->add_option("--out", f.out_dir, "output directory for artifacts");
        cmd->add_option("--format", f.format, "json | dot | csv");
        cmd->add_option("--frame", f.frame, "rotating | lab");
        cmd->add_flag("--allow-nondegenerate", f.allow_nondegenerate,
                      "proceed with non-degenerate detunings/frequencies");
        if (name == "stirap") {
            cmd->add_option("--T", f.duration, "schedule duration");
            cmd->add_option("--G", f.amplitude, "coupling magnitude");
            cmd->add_option("--schedule", f.schedule, "theta_ramp | sin2_overlap");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage_error;
    }

    CLI::App* cmd = app.get_subcommands().front();
    const std::string command = cmd->get_name();

    try {
        nlohmann::json j = f.config_path.empty() ? nlohmann::json::object() : load_config(f.config_path);
        overlay(j, *cmd, f);
        fill_model_defaults(command, j);
        const darklattice::RunConfig cfg = darklattice::config_from_json(j);
        const darklattice::CommandResult result = darklattice::run_command(command, cfg);
        std::cout << result.output;
        if (!cfg.out_dir.empty()) {
            const auto manifest = darklattice::persist(result.artifacts, cfg.out_dir, command, cfg);
            std::cout << "wrote " << manifest["files"].size() << " artifact(s) + manifest to "
                      << cfg.out_dir << '\n';
        }
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify_exception();
    }
}
