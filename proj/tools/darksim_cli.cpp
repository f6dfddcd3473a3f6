// Copyright 2026 The darksim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <CLI11.hpp>

#include <darksim/error.hpp>
#include <darksim/harness.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Options {
    std::string config;
    std::string out;
    long long seed = -1;
    std::vector<std::string> overrides;
    bool print_config = false;
};

int run(darksim::Scenario scenario, const Options& o) {
    using namespace darksim;
    ExperimentConfig cfg;
    if (!o.config.empty()) {
        cfg = load_config(o.config);
        if (cfg.scenario != scenario)
            throw Error(Errc::InvalidValue, "scenario: config file says '" + to_string(cfg.scenario) +
                                                "' but subcommand is '" + to_string(scenario) + "'");
    } else {
        cfg.scenario = scenario;
    }
    for (const auto& s : o.overrides) apply_override(cfg, s);
    if (o.seed >= 0) apply_override(cfg, "seed=" + std::to_string(o.seed));
    if (!o.out.empty()) cfg.output = o.out;
    if (o.print_config) {
        std::cout << emit_config(cfg);
        return 0;
    }
    const ResultSeries rs = run_scenario(cfg);
    if (cfg.output.empty())
        write_csv(rs, std::cout);
    else
        write_csv(rs, cfg.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"darksim: two-spin singlet / dark-state simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(darksim::version()));

    Options opts;
    const std::vector<std::pair<darksim::Scenario, std::string>> subs = {
        {darksim::Scenario::Lifetimes, "T1 and singlet lifetime under the calibrated model"},
        {darksim::Scenario::Fig3a, "singlet correlation: free, probe only, probe + control"},
        {darksim::Scenario::Fig3b, "deviation populations under probe + control"},
        {darksim::Scenario::Fig4a, "correlation vs tone offset"},
        {darksim::Scenario::Fig4b, "correlation vs probe/control amplitude ratio"},
        {darksim::Scenario::Spectra, "reference, probe-only and probe + control spectra"},
        {darksim::Scenario::Optimize, "robust two-tone pulse optimization"},
    };
    for (const auto& [sc, help] : subs) {
        auto* cmd = app.add_subcommand(darksim::to_string(sc), help);
        cmd->add_option("--config", opts.config, "config file (sectioned key = value)");
        cmd->add_option("--out", opts.out, "output CSV path, stdout if absent");
        cmd->add_option("--seed", opts.seed, "random seed")->check(CLI::NonNegativeNumber);
        cmd->add_option("--set", opts.overrides, "override, key=value (repeatable)")->take_all();
        cmd->add_flag("--print-config", opts.print_config, "print the resolved config and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    darksim::Scenario scenario{};
    for (const auto& [sc, help] : subs)
        if (app.got_subcommand(darksim::to_string(sc))) scenario = sc;

    try {
        return run(scenario, opts);
    } catch (const darksim::Error& e) {
        std::fprintf(stderr, "darksim: %s\n", e.what());
        const bool config = darksim::is_config_error(e.code()) || e.code() == darksim::Errc::Io;
        return config ? 2 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "darksim: %s\n", e.what());
        return 3;
    }
}
