/*
   Copyright 2026 The ebp Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// ebp: command-line front end for the epidemic branching process library.

#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ebp/cli.hpp"

namespace {

using Command = std::function<int(const ebp::Scenario&, const ebp::cli::Options&, std::ostream&, std::ostream&)>;

int run(const std::string& scenario_path, const ebp::cli::Options& opt, const Command& command)
{
    try {
        const auto scenario = ebp::load_scenario(scenario_path);
        return command(scenario, opt, std::cout, std::cerr);
    } catch (const ebp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ebp::cli::ConfigFailure;
    } catch (const ebp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ebp::cli::NumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ebp::cli::NumericalFailure;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Epidemic branching processes with and without vaccination"};
    app.require_subcommand(1);

    std::string scenario;
    ebp::cli::Options opt;
    std::uint64_t seed = 0;
    std::uint64_t paths = 0;
    Command command;

    auto add_sim_flags = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Override the scenario seed");
        sub->add_option("--paths", paths, "Override the ensemble size");
        sub->add_option("--workers", opt.workers, "Worker threads (0 = hardware concurrency)");
    };

    auto* extinction = app.add_subcommand("extinction", "R0, criticality and extinction probabilities");
    extinction->add_option("scenario", scenario, "Scenario file")->required();
    extinction->callback([&] { command = ebp::cli::cmd_extinction; });

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble with per-generation CSV");
    simulate->add_option("scenario", scenario, "Scenario file")->required();
    simulate->add_option("--out", opt.out, "CSV output path");
    add_sim_flags(simulate);
    simulate->callback([&] { command = ebp::cli::cmd_simulate; });

    auto* compare = app.add_subcommand("compare", "Pre/post-vaccination comparison");
    compare->add_option("scenario", scenario, "Scenario file")->required();
    compare->add_option("--out", opt.out, "CSV output path");
    add_sim_flags(compare);
    compare->callback([&] { command = ebp::cli::cmd_compare; });

    auto* check = app.add_subcommand("check", "Parameter-family inequalities and peak geometry");
    check->add_option("scenario", scenario, "Scenario file")->required();
    check->callback([&] { command = ebp::cli::cmd_check; });

    auto* oracle = app.add_subcommand("oracle", "Exact generation laws by convolution");
    oracle->add_option("scenario", scenario, "Scenario file")->required();
    oracle->add_option("--generations", opt.generations, "Number of generations")->required();
    oracle->add_option("--size-cap", opt.size_cap, "Largest tracked population size");
    oracle->callback([&] { command = ebp::cli::cmd_oracle; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ebp::cli::ConfigFailure;
    }

    for (auto* sub : {simulate, compare}) {
        if (sub->parsed()) {
            if (sub->count("--seed"))
                opt.seed = seed;
            if (sub->count("--paths"))
                opt.paths = paths;
        }
    }
    if (oracle->parsed() && opt.size_cap < 1) {
        std::cerr << "config error: --size-cap: must be positive\n";
        return ebp::cli::ConfigFailure;
    }
    return run(scenario, opt, command);
}
