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

#ifndef UAVMIMO_APP_HPP
#define UAVMIMO_APP_HPP

#include "report.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>

namespace uavmimo
{
    inline constexpr const char *kToolVersion = "1.0.0";

    inline std::string read_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot read " + path.string());
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    struct LoadedScenario
    {
        ScenarioConfig config;
        std::string config_digest;
        BuildingSet buildings;
        Scene scene;
    };

    // Parses the config, loads the referenced GeoJSON (path relative to the config file) and builds the scene
    inline LoadedScenario load_scenario(const std::filesystem::path &config_path)
    {
        const std::string text = read_file(config_path);
        ScenarioConfig config = parse_config(text);
        BuildingSet set;
        if (!config.buildings_geojson.empty())
        {
            std::filesystem::path geo = config.buildings_geojson;
            if (geo.is_relative())
                geo = config_path.parent_path() / geo;
            set = load_buildings(read_file(geo), config.origin, LoadOptions{config.meters_per_level});
        }
        Scene scene = build_scene(config, set.buildings);
        return LoadedScenario{std::move(config), sha256_hex(text), std::move(set), std::move(scene)};
    }

    struct RunOptions
    {
        unsigned workers = 1;
        std::filesystem::path out_dir = "out";
    };

    inline nlohmann::json manifest_json(const LoadedScenario &sc, const SweepResult &result, const RunOptions &opts,
                                        const std::vector<std::string> &outputs,
                                        const std::vector<std::pair<std::string, HeatmapScale>> &scales)
    {
        using nlohmann::json;
        json m;
        m["tool"] = "uavmimo";
        m["tool_version"] = kToolVersion;
        m["scenario"] = sc.config.name;
        m["config_sha256"] = sc.config_digest;
        m["scene_sha256"] = scene_digest(sc.scene);
        m["scene"] = {{"facets", sc.scene.facets().size()},
                      {"buildings", sc.scene.buildings().size()},
                      {"ground_material", sc.scene.ground_material().name},
                      {"building_material", sc.scene.building_material().name}};
        json rejected = json::array();
        for (const auto &r : sc.buildings.rejected)
            rejected.push_back({{"id", r.id}, {"reason", r.reason}});
        m["scene"]["rejected_features"] = rejected;
        m["tx_enu_m"] = {result.tx.x(), result.tx.y(), result.tx.z()};
        m["grid"] = {{"nx", result.grid.nx}, {"ny", result.grid.ny}};
        m["workers"] = opts.workers;
        m["timings_s"] = {{"trace", result.timings.trace_s}, {"analysis", result.timings.analysis_s}};
        m["warnings"] = result.warnings;

        json layers = json::array();
        for (const auto &layer : result.layers)
        {
            const auto &cov = layer.coverage;
            json l;
            l["altitude_m"] = layer.altitude;
            l["counts"] = {{"total", cov.total}, {"covered", cov.total - cov.z - cov.b}, {"Z", cov.z}, {"B", cov.b}};
            l["P_Z"] = cov.p_z();
            l["P_B"] = cov.p_b();
            l["conserved"] = cov.conserved();
            json crit = json::object();
            for (std::size_t c = 0; c < result.criteria.size(); ++c)
            {
                json entry;
                entry["rank_counts"] = cov.rank_counts[c];
                json probs = json::array();
                for (std::size_t r = 0; r < cov.rank_counts[c].size(); ++r)
                    probs.push_back(cov.p_rank(c, r));
                entry["P_rank"] = probs;
                entry["P_r1"] = cov.p_r1(c);
                entry["P_Z_plus_P_B_plus_P_r1"] = cov.p_z() + cov.p_b() + cov.p_r1(c);
                if (layer.means[c])
                    entry["mean_thresholds"] = *layer.means[c];
                crit[result.criteria[c].label] = entry;
            }
            l["criteria"] = crit;
            layers.push_back(l);
        }
        m["layers"] = layers;

        json sc_json = json::object();
        for (const auto &[name, s] : scales)
            sc_json[name] = {{"min", s.min}, {"max", s.max}};
        m["heatmap_scales"] = sc_json;
        m["outputs"] = outputs;
        return m;
    }

    // Full sweep; writes sites.csv, cdf.csv, manifest.json and heatmaps/ under opts.out_dir
    inline int run_command(const std::filesystem::path &config_path, const RunOptions &opts, std::ostream &log)
    {
        try
        {
            const LoadedScenario sc = load_scenario(config_path);
            for (const auto &r : sc.buildings.rejected)
                log << "warning: rejected feature " << r.id << ": " << r.reason << '\n';
            if (is_inside_building(transmitter_position(sc.config), sc.scene))
                throw std::runtime_error("transmitter is inside a building");

            const SweepResult result = run_sweep(sc.config, sc.scene, SweepOptions{opts.workers});
            for (const auto &w : result.warnings)
                log << "warning: " << w << '\n';

            namespace fs = std::filesystem;
            fs::create_directories(opts.out_dir / "heatmaps");
            std::vector<std::string> outputs;
            auto write_text = [&](const std::string &name, auto &&writer)
            {
                std::ofstream os(opts.out_dir / name, std::ios::binary);
                if (!os)
                    throw std::runtime_error("cannot write " + (opts.out_dir / name).string());
                writer(os);
                os.flush();
                if (!os)
                    throw std::runtime_error("I/O error writing " + (opts.out_dir / name).string());
                outputs.push_back(name);
            };

            const int n_sigma = sc.config.n_elements;
            write_text("sites.csv", [&](std::ostream &os) { write_sites_csv(result, n_sigma, os); });
            write_text("cdf.csv", [&](std::ostream &os) { write_cdf_csv(result, os); });

            std::vector<std::pair<std::string, HeatmapScale>> scales;
            for (const auto &layer : result.layers)
                for (const auto &view : heatmap_layers(result, layer, sc.config.n_elements))
                {
                    const std::string name = "heatmaps/" + altitude_tag(layer.altitude) + "_" + view.name + ".png";
                    write_png(emit_heatmap(view.cells, result.grid.nx, result.grid.ny, view.scale), opts.out_dir / name);
                    outputs.push_back(name);
                    scales.emplace_back(altitude_tag(layer.altitude) + "_" + view.name, view.scale);
                }

            outputs.push_back("manifest.json");
            const auto manifest = manifest_json(sc, result, opts, outputs, scales);
            std::ofstream mf(opts.out_dir / "manifest.json", std::ios::binary);
            mf << manifest.dump(2) << '\n';
            if (!mf)
                throw std::runtime_error("I/O error writing manifest.json");

            for (const auto &layer : result.layers)
            {
                const auto &cov = layer.coverage;
                log << altitude_tag(layer.altitude) << ": sites " << cov.total << ", covered " << cov.total - cov.z - cov.b
                    << ", Z " << cov.z << ", B " << cov.b << '\n';
            }
            log << "trace " << result.timings.trace_s << " s, analysis " << result.timings.analysis_s << " s\n";
            return 0;
        }
        catch (const std::exception &e)
        {
            log << "error: " << e.what() << '\n';
            return 1;
        }
    }

    // Parse and scene statistics only
    inline int validate_command(const std::filesystem::path &config_path, std::ostream &log)
    {
        try
        {
            const LoadedScenario sc = load_scenario(config_path);
            const auto grid = build_grid(sc.config);
            const Vec3 tx = transmitter_position(sc.config);
            log << "scenario: " << sc.config.name << '\n'
                << "config sha256: " << sc.config_digest << '\n'
                << "scene sha256: " << scene_digest(sc.scene) << '\n'
                << "buildings: " << sc.scene.buildings().size() << " (rejected " << sc.buildings.rejected.size() << ")\n"
                << "facets: " << sc.scene.facets().size() << '\n'
                << "tallest building: " << sc.scene.max_building_height() << " m\n"
                << "tx (ENU m): " << tx.x() << ", " << tx.y() << ", " << tx.z() << '\n'
                << "grid: " << grid.nx << " x " << grid.ny << " x " << grid.altitudes.size() << " altitudes\n";
            for (const auto &r : sc.buildings.rejected)
                log << "warning: rejected feature " << r.id << ": " << r.reason << '\n';
            if (is_inside_building(tx, sc.scene))
            {
                log << "error: transmitter is inside a building\n";
                return 1;
            }
            return 0;
        }
        catch (const std::exception &e)
        {
            log << "error: " << e.what() << '\n';
            return 1;
        }
    }
}

#endif
