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

#ifndef UAVMIMO_SWEEP_HPP
#define UAVMIMO_SWEEP_HPP

#include "ingest.hpp"
#include "mimo.hpp"
#include "propagation.hpp"
#include "rankanalysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace uavmimo
{
    // Runs body(i) for i in [0, n) on up to `workers` threads. Work is claimed through an
    // atomic counter; callers write into pre-sized slots, so results never depend on timing.
    template <typename Body>
    void parallel_for_index(std::size_t n, unsigned workers, Body &&body)
    {
        workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
        if (workers == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                body(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        {
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                    {
                        try
                        {
                            body(i);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(error_mutex);
                            if (!error)
                                error = std::current_exception();
                            next.store(n);
                        }
                    }
                });
        }
        if (error)
            std::rethrow_exception(error);
    }

    // Ground plane spans the receiver area, the transmitter and every footprint
    inline Bounds2 scene_bounds(const ScenarioConfig &config, const Vec3 &tx, const std::vector<Building> &buildings)
    {
        Bounds2 b;
        b.min = Vec2(-0.5 * config.area_width_m, -0.5 * config.area_depth_m).cwiseMin(tx.head<2>());
        b.max = Vec2(0.5 * config.area_width_m, 0.5 * config.area_depth_m).cwiseMax(tx.head<2>());
        for (const auto &bld : buildings)
            for (const auto &p : bld.footprint)
            {
                b.min = b.min.cwiseMin(p);
                b.max = b.max.cwiseMax(p);
            }
        b.min.array() -= 1.0;
        b.max.array() += 1.0;
        return b;
    }

    inline Vec3 transmitter_position(const ScenarioConfig &config)
    {
        const Vec2 xy = project_to_enu(config.tx_lat_deg, config.tx_lon_deg, config.origin);
        return {xy.x(), xy.y(), config.tx_height_m};
    }

    inline Scene build_scene(const ScenarioConfig &config, std::vector<Building> buildings)
    {
        const Vec3 tx = transmitter_position(config);
        const Bounds2 bounds = scene_bounds(config, tx, buildings);
        return Scene(std::move(buildings), config.building(), config.ground(), bounds);
    }

    struct LayerResult
    {
        double altitude = 0.0;
        std::vector<SiteResult> sites;                       // grid order
        std::vector<std::optional<std::vector<double>>> means; // per criterion, set for mean criteria
        CoverageSummary coverage;
    };

    struct SweepTimings
    {
        double trace_s = 0.0;
        double analysis_s = 0.0;
    };

    struct SweepResult
    {
        ReceiverGrid grid;
        Vec3 tx = Vec3::Zero();
        std::vector<CriterionSpec> criteria;
        std::vector<LayerResult> layers;
        std::vector<std::string> warnings;
        SweepTimings timings;
    };

    struct SweepOptions
    {
        unsigned workers = 1;
    };

    namespace detail
    {
        inline void fill_rank(SiteResult &site, std::size_t c, const RankCriterion &criterion)
        {
            const Thresholded t = apply_threshold(*site.spectrum, criterion);
            site.ranks[c] = t.rank;
            // two strongest survivors; under the mean criterion they need not be orders 1 and 2
            std::vector<double> kept;
            for (double v : t.sigma)
                if (v > 0.0)
                    kept.push_back(v);
            site.cn_db_by_criterion[c] = condition_number_db(kept);
        }
    }

    // Spectrum pass over every site in parallel, then a barrier, then the mean-criterion pass
    inline SweepResult run_sweep(const ScenarioConfig &config, const Scene &scene, const SweepOptions &options = {})
    {
        using clock = std::chrono::steady_clock;
        SweepResult out;
        out.grid = build_grid(config);
        out.tx = transmitter_position(config);
        out.criteria = config.rank_criteria;

        const double lambda = config.wavelength_m();
        const PathTracer tracer(scene, out.tx, config.max_reflections, lambda);
        const ArrayConfig tx_array{config.n_elements, config.d_tx_wavelengths, config.tx_array_axis, out.tx};
        const std::size_t n_crit = config.rank_criteria.size();

        const std::size_t per_layer = out.grid.sites_per_layer();
        const std::size_t n_layers = out.grid.layers.size();
        out.layers.resize(n_layers);
        for (std::size_t l = 0; l < n_layers; ++l)
        {
            out.layers[l].altitude = out.grid.altitudes[l];
            out.layers[l].sites.resize(per_layer);
            out.layers[l].means.resize(n_crit);
        }

        const auto t0 = clock::now();
        parallel_for_index(per_layer * n_layers, options.workers, [&](std::size_t i) {
            const std::size_t l = i / per_layer, s = i % per_layer;
            const Vec3 &rx = out.grid.layers[l][s];
            SiteResult &site = out.layers[l].sites[s];
            site.position = rx;
            if ((rx - out.tx).norm() <= kSelfHitEps)
            {
                site.flag = SiteFlag::no_coverage; // receiver on top of the transmitter
                return;
            }
            const PathSet paths = tracer.trace(rx);
            site.flag = paths.flag;
            site.n_paths = paths.paths.size();
            if (paths.flag != SiteFlag::covered)
                return;
            site.rssi_dbm = rssi_dbm(paths, config.tx_power_w, config.rssi_sum_mode);
            const ArrayConfig rx_array{config.n_elements, config.d_rx_wavelengths, config.rx_array_axis, rx};
            site.spectrum = singular_values(synthesize_channel(paths, tx_array, rx_array, lambda));
            site.cn_db = condition_number_db(*site.spectrum);
            site.ranks.assign(n_crit, 0);
            site.cn_db_by_criterion.assign(n_crit, std::nullopt);
            for (std::size_t c = 0; c < n_crit; ++c)
                if (config.rank_criteria[c].kind == CriterionSpec::Kind::relative_k)
                    detail::fill_rank(site, c, RelativeK{config.rank_criteria[c].k});
        });
        const auto t1 = clock::now();

        for (std::size_t l = 0; l < n_layers; ++l)
        {
            auto &layer = out.layers[l];
            for (std::size_t c = 0; c < n_crit; ++c)
            {
                if (config.rank_criteria[c].kind != CriterionSpec::Kind::population_mean)
                    continue;
                try
                {
                    layer.means[c] = population_mean_thresholds(
                        layer.sites, config.mean_population == MeanPopulation::all_as_zero);
                }
                catch (const std::domain_error &)
                {
                    out.warnings.push_back("altitude " + std::to_string(layer.altitude) +
                                           " m: no covered sites, criterion '" + config.rank_criteria[c].label +
                                           "' skipped");
                    continue;
                }
                const PopulationMean criterion{*layer.means[c]};
                for (auto &site : layer.sites)
                    if (site.covered())
                        detail::fill_rank(site, c, criterion);
            }
            layer.coverage = coverage_probabilities(layer.sites, n_crit, static_cast<std::size_t>(config.n_elements));
        }
        const auto t2 = clock::now();
        out.timings.trace_s = std::chrono::duration<double>(t1 - t0).count();
        out.timings.analysis_s = std::chrono::duration<double>(t2 - t1).count();
        return out;
    }
}

#endif
