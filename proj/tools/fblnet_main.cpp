#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fblnet/commands.hpp"

namespace {

// exit codes: 0 ok, 1 input error, 2 numerical/core error, 3 indeterminate
// simulation classification
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCore = 2;
constexpr int kExitIndeterminate = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fblnet::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Output {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    void open(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path, std::ios::binary);
        if (!file) throw fblnet::ConfigError("cannot open output file '" + path + "'");
        stream = &file;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-blocklength TDMA network analyzer and simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int jobs = 1;
    std::optional<std::uint64_t> seed_override;
    std::string figure;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* copt = cmd->add_option("--config", config_path, "scenario file (key=value lines)");
        if (needs_config) copt->required();
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        return cmd;
    };

    auto* c_optimize = add_common(app.add_subcommand("optimize", "grid-search the optimal (k, L)"), true);
    auto* c_throughput = add_common(app.add_subcommand("throughput", "evaluate throughput at fixed (k, L)"), true);
    auto* c_stability = add_common(app.add_subcommand("stability", "analytic stability verdicts"), true);
    auto* c_simulate = add_common(app.add_subcommand("simulate", "slot-level Monte Carlo run"), true);
    c_simulate->add_option("--seed", seed_override, "override the scenario seed");
    auto* c_sweep = add_common(app.add_subcommand("sweep", "evaluate along a parameter axis"), true);
    c_sweep->add_option("--jobs", jobs, "worker threads for grid points")->check(CLI::PositiveNumber);
    auto* c_reproduce = add_common(app.add_subcommand("reproduce", "emit a reference figure dataset"), false);
    c_reproduce->add_option("figure", figure, "fig2|fig3|fig4a|fig4b|fig6a|fig6b")->required();
    auto* c_fit = add_common(app.add_subcommand("fit", "fit the approximation constants"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        Output out;
        out.open(out_path);

        if (c_reproduce->parsed()) {
            fblnet::cmd_reproduce(figure, *out.stream);
            return kExitOk;
        }
        if (c_fit->parsed()) {
            fblnet::cmd_fit(*out.stream);
            return kExitOk;
        }

        fblnet::Scenario scenario = fblnet::parse_scenario(read_file(config_path));
        if (seed_override) {
            if (!scenario.sim) scenario.sim = fblnet::SimBlock{};
            scenario.sim->seed = *seed_override;
        }

        if (c_optimize->parsed()) {
            fblnet::cmd_optimize(scenario, *out.stream);
        } else if (c_throughput->parsed()) {
            fblnet::cmd_throughput(scenario, *out.stream);
        } else if (c_stability->parsed()) {
            fblnet::cmd_stability(scenario, *out.stream);
        } else if (c_simulate->parsed()) {
            const fblnet::StabilityClass cls = fblnet::cmd_simulate(scenario, *out.stream);
            if (cls == fblnet::StabilityClass::Indeterminate) return kExitIndeterminate;
        } else if (c_sweep->parsed()) {
            fblnet::cmd_sweep(scenario, *out.stream, jobs);
        }
        return kExitOk;
    } catch (const fblnet::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCore;
    }
}
