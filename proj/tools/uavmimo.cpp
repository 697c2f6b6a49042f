// SPDX-License-Identifier: Apache-2.0
//
// uavmimo: site-specific ray tracing and MIMO rank analysis for UAV links
// Copyright (C) 2026 The uavmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <uavmimo/app.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char **argv)
{
    CLI::App app{"uavmimo - site-specific ray tracing and MIMO rank/condition-number maps for UAV receivers"};
    app.set_version_flag("--version", std::string(uavmimo::kToolVersion));
    app.require_subcommand(1);

    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::string config;

    auto *run = app.add_subcommand("run", "Run the full altitude sweep and write CSV, CDF, heatmaps and manifest");
    run->add_option("config", config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--workers", workers, "Worker threads over receiver sites")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Accepted and ignored; the pipeline is deterministic");

    auto *validate = app.add_subcommand("validate", "Parse the config and geodata and print scene statistics");
    validate->add_option("config", config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    if (*run)
        return uavmimo::run_command(config, uavmimo::RunOptions{workers, out_dir}, std::cerr);
    return uavmimo::validate_command(config, std::cout);
}
