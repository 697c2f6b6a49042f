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

#ifndef UAVMIMO_INGEST_HPP
#define UAVMIMO_INGEST_HPP

#include "geometry.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavmimo
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kEarthRadius = 6378137.0;    // m, WGS-84 semi-major axis

    class IngestError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // ------------------------------------------------------------------------
    // Local tangent-plane projection

    struct GeoOrigin
    {
        double lat0_deg = 0.0;
        double lon0_deg = 0.0;

        void validate() const
        {
            if (!(std::abs(lat0_deg) <= 90.0) || !(std::abs(lon0_deg) <= 180.0))
                throw std::invalid_argument("geo origin out of range");
        }
    };

    inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
    inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

    // Equirectangular projection about `origin`: x east, y north, meters
    inline Vec2 project_to_enu(double lat_deg, double lon_deg, const GeoOrigin &origin)
    {
        const double x = kEarthRadius * std::cos(deg2rad(origin.lat0_deg)) * deg2rad(lon_deg - origin.lon0_deg);
        const double y = kEarthRadius * deg2rad(lat_deg - origin.lat0_deg);
        return {x, y};
    }

    // Inverse of project_to_enu; returns (lat, lon) in degrees
    inline std::pair<double, double> enu_to_geodetic(const Vec2 &xy, const GeoOrigin &origin)
    {
        const double lat = origin.lat0_deg + rad2deg(xy.y() / kEarthRadius);
        const double lon = origin.lon0_deg + rad2deg(xy.x() / (kEarthRadius * std::cos(deg2rad(origin.lat0_deg))));
        return {lat, lon};
    }

    // ------------------------------------------------------------------------
    // GeoJSON buildings

    struct LoadOptions
    {
        double meters_per_level = 3.0;
    };

    struct RejectedFeature
    {
        std::string id;
        std::string reason;
    };

    struct BuildingSet
    {
        std::vector<Building> buildings;
        std::vector<RejectedFeature> rejected;
    };

    namespace detail
    {
        inline std::string line_column(std::string_view text, std::size_t byte)
        {
            std::size_t line = 1, col = 1;
            for (std::size_t i = 0; i < byte && i < text.size(); ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            return "line " + std::to_string(line) + ", column " + std::to_string(col);
        }

        inline nlohmann::json parse_json(std::string_view text, std::string_view what)
        {
            try
            {
                return nlohmann::json::parse(text.begin(), text.end());
            }
            catch (const nlohmann::json::parse_error &e)
            {
                // byte is 1-based and points one past the offending character
                const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
                throw IngestError(std::string(what) + ": malformed JSON at " + line_column(text, at) +
                                  " (byte offset " + std::to_string(at) + "): " + e.what());
            }
        }

        // Accepts numbers and numeric strings such as "12", "12.5 m"
        inline std::optional<double> numeric_property(const nlohmann::json &props, const char *key)
        {
            if (!props.is_object() || !props.contains(key))
                return std::nullopt;
            const auto &v = props.at(key);
            if (v.is_number())
                return v.get<double>();
            if (v.is_string())
            {
                const auto &s = v.get_ref<const std::string &>();
                std::istringstream in(s);
                double d = 0.0;
                if (in >> d)
                    return d;
            }
            return std::nullopt;
        }

        inline std::string feature_id(const nlohmann::json &feature, std::size_t index)
        {
            auto as_text = [](const nlohmann::json &v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
            if (feature.contains("id") && !feature["id"].is_null())
                return as_text(feature["id"]);
            if (feature.contains("properties") && feature["properties"].is_object() &&
                feature["properties"].contains("id"))
                return as_text(feature["properties"]["id"]);
            return "#" + std::to_string(index);
        }
    }

    // One Building per Polygon (or MultiPolygon part). Holes are ignored.
    inline BuildingSet load_buildings(std::string_view geojson_text, const GeoOrigin &origin, const LoadOptions &opts = {})
    {
        origin.validate();
        const auto doc = detail::parse_json(geojson_text, "GeoJSON");
        if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
            !doc["features"].is_array())
            throw IngestError("GeoJSON: expected a FeatureCollection with a 'features' array");

        BuildingSet out;
        const auto &features = doc["features"];
        for (std::size_t i = 0; i < features.size(); ++i)
        {
            const auto &f = features[i];
            const std::string id = detail::feature_id(f, i);
            if (!f.is_object() || !f.contains("geometry") || !f["geometry"].is_object())
            {
                out.rejected.push_back({id, "feature has no geometry"});
                continue;
            }
            const auto &geom = f["geometry"];
            const std::string type = geom.value("type", "");
            std::vector<nlohmann::json> polygons;
            if (type == "Polygon")
                polygons.push_back(geom["coordinates"]);
            else if (type == "MultiPolygon" && geom["coordinates"].is_array())
                for (const auto &p : geom["coordinates"])
                    polygons.push_back(p);
            else
            {
                out.rejected.push_back({id, "unsupported geometry type '" + type + "'"});
                continue;
            }

            const nlohmann::json props = f.contains("properties") ? f["properties"] : nlohmann::json::object();
            std::optional<double> height = detail::numeric_property(props, "height");
            if (!height)
            {
                auto levels = detail::numeric_property(props, "levels");
                if (!levels)
                    levels = detail::numeric_property(props, "building:levels");
                if (levels)
                    height = *levels * opts.meters_per_level;
            }
            if (!height)
            {
                out.rejected.push_back({id, "feature has neither 'height' nor 'levels'"});
                continue;
            }
            if (!(*height > 0.0) || !std::isfinite(*height))
            {
                out.rejected.push_back({id, "non-positive height"});
                continue;
            }

            for (std::size_t part = 0; part < polygons.size(); ++part)
            {
                const auto &rings = polygons[part];
                const std::string part_id = polygons.size() > 1 ? id + "/" + std::to_string(part) : id;
                if (!rings.is_array() || rings.empty() || !rings[0].is_array())
                {
                    out.rejected.push_back({part_id, "polygon has no outer ring"});
                    continue;
                }
                std::vector<Vec2> ring;
                bool ok = true;
                for (const auto &pos : rings[0])
                {
                    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number())
                    {
                        ok = false;
                        break;
                    }
                    // GeoJSON positions are [lon, lat]
                    ring.push_back(project_to_enu(pos[1].get<double>(), pos[0].get<double>(), origin));
                }
                if (!ok)
                {
                    out.rejected.push_back({part_id, "invalid coordinate"});
                    continue;
                }
                ring = poly::normalize_ring(std::move(ring));
                if (!poly::is_simple(ring))
                {
                    out.rejected.push_back({part_id, "self-intersecting or degenerate footprint"});
                    continue;
                }
                out.buildings.push_back(Building{std::move(ring), *height, part_id});
            }
        }
        return out;
    }

    // ------------------------------------------------------------------------
    // Material library (ITU-R P.2040 style: eps = a f^b, sigma = c f^d, f in GHz)

    struct MaterialModel
    {
        double a, b, c, d;
    };

    inline std::optional<MaterialModel> itu_material_model(std::string_view name)
    {
        if (name == "concrete")
            return MaterialModel{5.24, 0.0, 0.0462, 0.7822};
        if (name == "brick")
            return MaterialModel{3.91, 0.0, 0.0238, 0.16};
        if (name == "wood")
            return MaterialModel{1.99, 0.0, 0.0047, 1.0718};
        if (name == "glass")
            return MaterialModel{6.31, 0.0, 0.0036, 1.3394};
        if (name == "very_dry_ground")
            return MaterialModel{3.0, 0.0, 0.00015, 2.52};
        if (name == "medium_dry_ground" || name == "vegetation")
            return MaterialModel{15.0, -0.1, 0.035, 1.63};
        if (name == "wet_ground")
            return MaterialModel{30.0, -0.4, 0.15, 1.30};
        return std::nullopt;
    }

    inline Material material_by_name(const std::string &name, double freq_hz)
    {
        if (name == "perfect_reflector")
            return Material{name, 1.0, 0.0, true};
        const auto model = itu_material_model(name);
        if (!model)
            throw std::invalid_argument("unknown material '" + name + "'");
        const double f_ghz = freq_hz / 1e9;
        return Material{name, model->a * std::pow(f_ghz, model->b), model->c * std::pow(f_ghz, model->d), false};
    }

    // ------------------------------------------------------------------------
    // Scenario configuration

    enum class RssiMode
    {
        coherent,
        incoherent
    };

    enum class MeanPopulation
    {
        covered,     // only sites with coverage enter the per-order mean
        all_as_zero  // Z/B sites enter with an all-zero spectrum
    };

    struct CriterionSpec
    {
        enum class Kind
        {
            relative_k,
            population_mean
        };
        Kind kind = Kind::population_mean;
        double k = 0.0;
        std::string label; // column suffix, e.g. "mean", "k100"

        static CriterionSpec parse(const std::string &text)
        {
            if (text == "mean")
                return {Kind::population_mean, 0.0, "mean"};
            if (text.size() > 1 && text[0] == 'k')
            {
                std::size_t pos = 0;
                double k = 0.0;
                try
                {
                    k = std::stod(text.substr(1), &pos);
                }
                catch (const std::exception &)
                {
                    pos = 0;
                }
                if (pos == text.size() - 1 && k > 1.0 && std::isfinite(k))
                    return {Kind::relative_k, k, text};
            }
            throw std::invalid_argument("rank criterion '" + text + "': expected 'mean' or 'k<K>' with K > 1");
        }
    };

    struct ScenarioConfig
    {
        std::string name = "scenario";
        double carrier_freq_hz = 3.4e9;
        GeoOrigin origin;                 // center of the receiver area
        double tx_lat_deg = 0.0;
        double tx_lon_deg = 0.0;
        double tx_height_m = 10.0;        // above ground
        double tx_power_w = 10.0;
        std::vector<double> altitudes_m = {3.0, 30.0, 70.0, 110.0};
        double grid_resolution_m = 20.0;
        double area_width_m = 580.0;      // east-west
        double area_depth_m = 460.0;      // north-south
        int max_reflections = 2;
        int n_elements = 4;
        double d_tx_wavelengths = 1.0;
        double d_rx_wavelengths = 0.5;
        Vec3 tx_array_axis = Vec3::UnitX();
        Vec3 rx_array_axis = Vec3::UnitX();
        std::string ground_material = "perfect_reflector";
        std::string building_material = "concrete";
        std::optional<double> ground_rel_permittivity;
        std::optional<double> ground_conductivity_s_per_m;
        std::vector<CriterionSpec> rank_criteria = {CriterionSpec::parse("mean"), CriterionSpec::parse("k10"),
                                                    CriterionSpec::parse("k100"), CriterionSpec::parse("k10000")};
        RssiMode rssi_sum_mode = RssiMode::coherent;
        MeanPopulation mean_population = MeanPopulation::covered;
        std::string buildings_geojson;    // relative to the config file; empty for an open field
        double meters_per_level = 3.0;

        double wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }

        Material ground() const
        {
            Material m = material_by_name(ground_material, carrier_freq_hz);
            if (ground_rel_permittivity || ground_conductivity_s_per_m)
            {
                m.perfect_reflector = false;
                if (ground_rel_permittivity)
                    m.rel_permittivity = *ground_rel_permittivity;
                if (ground_conductivity_s_per_m)
                    m.conductivity = *ground_conductivity_s_per_m;
            }
            return m;
        }

        Material building() const { return material_by_name(building_material, carrier_freq_hz); }

        void validate() const
        {
            auto positive = [](double v, const char *key)
            {
                if (!(v > 0.0) || !std::isfinite(v))
                    throw std::invalid_argument(std::string(key) + " must be > 0");
            };
            positive(carrier_freq_hz, "carrier_freq_hz");
            positive(tx_height_m, "tx_height_m");
            positive(tx_power_w, "tx_power_w");
            positive(grid_resolution_m, "grid_resolution_m");
            positive(area_width_m, "area_width_m");
            positive(area_depth_m, "area_depth_m");
            positive(d_tx_wavelengths, "d_tx_wavelengths");
            positive(d_rx_wavelengths, "d_rx_wavelengths");
            positive(meters_per_level, "meters_per_level");
            origin.validate();
            if (!(std::abs(tx_lat_deg) <= 90.0) || !(std::abs(tx_lon_deg) <= 180.0))
                throw std::invalid_argument("tx position out of range");
            if (max_reflections < 0 || max_reflections > 2)
                throw std::invalid_argument("max_reflections must be 0, 1 or 2");
            if (n_elements < 1)
                throw std::invalid_argument("n_elements must be >= 1");
            if (altitudes_m.empty())
                throw std::invalid_argument("altitudes_m must not be empty");
            std::set<double> seen;
            for (double a : altitudes_m)
            {
                positive(a, "altitudes_m entry");
                if (!seen.insert(a).second)
                    throw std::invalid_argument("altitudes_m entries must be distinct");
            }
            if (std::floor(area_width_m / grid_resolution_m) + 1 < 2 || std::floor(area_depth_m / grid_resolution_m) + 1 < 2)
                throw std::invalid_argument("grid needs at least 2 points per axis");
            for (const auto *axis : {&tx_array_axis, &rx_array_axis})
                if (std::abs(axis->norm() - 1.0) > 1e-9)
                    throw std::invalid_argument("array axes must be unit vectors");
            if (rank_criteria.empty())
                throw std::invalid_argument("rank_criteria must not be empty");
            std::set<std::string> labels;
            for (const auto &c : rank_criteria)
                if (!labels.insert(c.label).second)
                    throw std::invalid_argument("duplicate rank criterion '" + c.label + "'");
            ground().validate();
            building().validate();
        }
    };

    // Flat JSON object; keys carry their units. Unknown keys are rejected.
    inline ScenarioConfig parse_config(std::string_view text)
    {
        const auto doc = detail::parse_json(text, "config");
        if (!doc.is_object())
            throw IngestError("config: top level must be a JSON object");

        ScenarioConfig c;
        auto num = [](const nlohmann::json &v, const std::string &key)
        {
            if (!v.is_number())
                throw IngestError("config: '" + key + "' must be a number");
            return v.get<double>();
        };
        auto integer = [](const nlohmann::json &v, const std::string &key)
        {
            if (!v.is_number_integer())
                throw IngestError("config: '" + key + "' must be an integer");
            return v.get<int>();
        };
        auto str = [](const nlohmann::json &v, const std::string &key)
        {
            if (!v.is_string())
                throw IngestError("config: '" + key + "' must be a string");
            return v.get<std::string>();
        };
        auto vec3 = [&](const nlohmann::json &v, const std::string &key)
        {
            if (!v.is_array() || v.size() != 3)
                throw IngestError("config: '" + key + "' must be a 3-element array");
            return Vec3(num(v[0], key), num(v[1], key), num(v[2], key));
        };

        for (const auto &[key, v] : doc.items())
        {
            if (key == "name")
                c.name = str(v, key);
            else if (key == "carrier_freq_hz")
                c.carrier_freq_hz = num(v, key);
            else if (key == "origin_lat_deg")
                c.origin.lat0_deg = num(v, key);
            else if (key == "origin_lon_deg")
                c.origin.lon0_deg = num(v, key);
            else if (key == "tx_lat_deg")
                c.tx_lat_deg = num(v, key);
            else if (key == "tx_lon_deg")
                c.tx_lon_deg = num(v, key);
            else if (key == "tx_height_m")
                c.tx_height_m = num(v, key);
            else if (key == "tx_power_w")
                c.tx_power_w = num(v, key);
            else if (key == "altitudes_m")
            {
                if (!v.is_array())
                    throw IngestError("config: 'altitudes_m' must be an array");
                c.altitudes_m.clear();
                for (const auto &a : v)
                    c.altitudes_m.push_back(num(a, key));
            }
            else if (key == "grid_resolution_m")
                c.grid_resolution_m = num(v, key);
            else if (key == "area_width_m")
                c.area_width_m = num(v, key);
            else if (key == "area_depth_m")
                c.area_depth_m = num(v, key);
            else if (key == "max_reflections")
                c.max_reflections = integer(v, key);
            else if (key == "n_elements")
                c.n_elements = integer(v, key);
            else if (key == "d_tx_wavelengths")
                c.d_tx_wavelengths = num(v, key);
            else if (key == "d_rx_wavelengths")
                c.d_rx_wavelengths = num(v, key);
            else if (key == "tx_array_axis")
                c.tx_array_axis = vec3(v, key);
            else if (key == "rx_array_axis")
                c.rx_array_axis = vec3(v, key);
            else if (key == "ground_material")
                c.ground_material = str(v, key);
            else if (key == "building_material")
                c.building_material = str(v, key);
            else if (key == "ground_rel_permittivity")
                c.ground_rel_permittivity = num(v, key);
            else if (key == "ground_conductivity_s_per_m")
                c.ground_conductivity_s_per_m = num(v, key);
            else if (key == "rank_criteria")
            {
                if (!v.is_array())
                    throw IngestError("config: 'rank_criteria' must be an array");
                c.rank_criteria.clear();
                for (const auto &s : v)
                    c.rank_criteria.push_back(CriterionSpec::parse(str(s, key)));
            }
            else if (key == "rssi_sum_mode")
            {
                const auto s = str(v, key);
                if (s == "coherent")
                    c.rssi_sum_mode = RssiMode::coherent;
                else if (s == "incoherent")
                    c.rssi_sum_mode = RssiMode::incoherent;
                else
                    throw IngestError("config: 'rssi_sum_mode' must be 'coherent' or 'incoherent'");
            }
            else if (key == "mean_population")
            {
                const auto s = str(v, key);
                if (s == "covered")
                    c.mean_population = MeanPopulation::covered;
                else if (s == "all_as_zero")
                    c.mean_population = MeanPopulation::all_as_zero;
                else
                    throw IngestError("config: 'mean_population' must be 'covered' or 'all_as_zero'");
            }
            else if (key == "buildings_geojson")
                c.buildings_geojson = str(v, key);
            else if (key == "meters_per_level")
                c.meters_per_level = num(v, key);
            else if (key == "comment" || key.starts_with("_"))
                continue; // free-form annotations
            else
                throw IngestError("config: unknown key '" + key + "'");
        }

        try
        {
            c.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw IngestError(std::string("config: ") + e.what());
        }
        return c;
    }

    // ------------------------------------------------------------------------
    // Receiver grid

    struct ReceiverGrid
    {
        std::size_t nx = 0; // points along east
        std::size_t ny = 0; // points along north
        std::vector<double> altitudes;
        std::vector<std::vector<Vec3>> layers; // one per altitude, row-major (y outer, x inner)

        std::size_t sites_per_layer() const { return nx * ny; }
    };

    inline ReceiverGrid build_grid(const ScenarioConfig &config)
    {
        ReceiverGrid g;
        const double res = config.grid_resolution_m;
        g.nx = static_cast<std::size_t>(std::floor(config.area_width_m / res)) + 1;
        g.ny = static_cast<std::size_t>(std::floor(config.area_depth_m / res)) + 1;
        const double x0 = -0.5 * static_cast<double>(g.nx - 1) * res;
        const double y0 = -0.5 * static_cast<double>(g.ny - 1) * res;
        g.altitudes = config.altitudes_m;
        for (double z : config.altitudes_m)
        {
            std::vector<Vec3> layer;
            layer.reserve(g.nx * g.ny);
            for (std::size_t iy = 0; iy < g.ny; ++iy)
                for (std::size_t ix = 0; ix < g.nx; ++ix)
                    layer.emplace_back(x0 + static_cast<double>(ix) * res, y0 + static_cast<double>(iy) * res, z);
            g.layers.push_back(std::move(layer));
        }
        return g;
    }
}

#endif
