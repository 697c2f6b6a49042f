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

#ifndef UAVMIMO_REPORT_HPP
#define UAVMIMO_REPORT_HPP

#include "sweep.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <png.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace uavmimo
{
    // ------------------------------------------------------------------------
    // Number formatting and digests

    // Shortest round-trip representation; identical bytes for identical doubles
    inline std::string format_double(double v)
    {
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        std::array<char, 64> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), res.ptr);
    }

    inline std::string format_optional(const std::optional<double> &v) { return v ? format_double(*v) : std::string(); }

    inline std::string sha256_hex(std::string_view bytes)
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 failed");
        static constexpr char hex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i)
        {
            out += hex[md[i] >> 4];
            out += hex[md[i] & 0xF];
        }
        return out;
    }

    // Digest over facet vertices, materials and footprints in construction order
    inline std::string scene_digest(const Scene &scene)
    {
        std::string bytes;
        auto put = [&](double v) { bytes.append(reinterpret_cast<const char *>(&v), sizeof v); };
        for (std::size_t m = 0; m < 2; ++m)
        {
            const auto &mat = scene.material(m);
            bytes += mat.name;
            put(mat.rel_permittivity);
            put(mat.conductivity);
            bytes += mat.perfect_reflector ? '1' : '0';
        }
        for (const auto &f : scene.facets())
        {
            bytes += 'F';
            bytes += static_cast<char>(f.material());
            for (const auto &v : f.vertices())
            {
                put(v.x());
                put(v.y());
                put(v.z());
            }
        }
        for (const auto &b : scene.buildings())
        {
            bytes += 'B';
            bytes += b.id;
            put(b.height);
        }
        return sha256_hex(bytes);
    }

    inline const char *flag_code(SiteFlag f)
    {
        switch (f)
        {
        case SiteFlag::covered:
            return "C";
        case SiteFlag::no_coverage:
            return "Z";
        case SiteFlag::inside_building:
            return "B";
        }
        return "?";
    }

    // ------------------------------------------------------------------------
    // sites.csv

    // x,y,z,flag,rssi_dbm,sigma1..sigmaN,rank_<c>...,cn_db,cn_db_<c>...
    inline void write_sites_csv(const SweepResult &result, int n_sigma, std::ostream &os)
    {
        os << "x,y,z,flag,rssi_dbm";
        for (int s = 1; s <= n_sigma; ++s)
            os << ",sigma" << s;
        for (const auto &c : result.criteria)
            os << ",rank_" << c.label;
        os << ",cn_db";
        for (const auto &c : result.criteria)
            os << ",cn_db_" << c.label;
        os << '\n';

        for (const auto &layer : result.layers)
            for (const auto &site : layer.sites)
            {
                os << format_double(site.position.x()) << ',' << format_double(site.position.y()) << ','
                   << format_double(site.position.z()) << ',' << flag_code(site.flag) << ','
                   << format_optional(site.rssi_dbm);
                for (int s = 0; s < n_sigma; ++s)
                {
                    os << ',';
                    if (site.spectrum && static_cast<std::size_t>(s) < site.spectrum->size())
                        os << format_double(site.spectrum->sigma[static_cast<std::size_t>(s)]);
                }
                for (std::size_t c = 0; c < result.criteria.size(); ++c)
                {
                    os << ',';
                    if (c < site.ranks.size())
                        os << site.ranks[c];
                }
                os << ',' << format_optional(site.cn_db);
                for (std::size_t c = 0; c < result.criteria.size(); ++c)
                    os << ',' << (c < site.cn_db_by_criterion.size() ? format_optional(site.cn_db_by_criterion[c]) : "");
                os << '\n';
            }
    }

    // ------------------------------------------------------------------------
    // cdf.csv

    // metric,criterion,altitude_m,breakpoint,probability. ECDFs run over covered sites.
    inline void write_cdf_csv(const SweepResult &result, std::ostream &os)
    {
        os << "metric,criterion,altitude_m,breakpoint,probability\n";
        auto emit = [&](const char *metric, const std::string &criterion, double altitude, const Ecdf &f)
        {
            for (std::size_t i = 0; i < f.x.size(); ++i)
                os << metric << ',' << criterion << ',' << format_double(altitude) << ',' << format_double(f.x[i])
                   << ',' << format_double(f.p[i]) << '\n';
        };
        for (std::size_t c = 0; c < result.criteria.size(); ++c)
            for (const auto &layer : result.layers)
            {
                std::vector<double> v;
                for (const auto &s : layer.sites)
                    if (s.covered() && c < s.ranks.size())
                        v.push_back(s.ranks[c]);
                emit("rank", result.criteria[c].label, layer.altitude, ecdf(std::move(v)));
            }
        for (std::size_t c = 0; c < result.criteria.size(); ++c)
            for (const auto &layer : result.layers)
            {
                std::vector<double> v;
                for (const auto &s : layer.sites)
                    if (s.covered() && c < s.cn_db_by_criterion.size() && s.cn_db_by_criterion[c])
                        v.push_back(*s.cn_db_by_criterion[c]);
                emit("cn_db", result.criteria[c].label, layer.altitude, ecdf(std::move(v)));
            }
        for (const auto &layer : result.layers)
        {
            std::vector<double> v;
            for (const auto &s : layer.sites)
                if (s.cn_db)
                    v.push_back(*s.cn_db);
            emit("cn_db", "raw", layer.altitude, ecdf(std::move(v)));
        }
        for (const auto &layer : result.layers)
        {
            std::vector<double> v;
            for (const auto &s : layer.sites)
                if (s.rssi_dbm && std::isfinite(*s.rssi_dbm))
                    v.push_back(*s.rssi_dbm);
            emit("rssi_dbm", "none", layer.altitude, ecdf(std::move(v)));
        }
    }

    // ------------------------------------------------------------------------
    // Heatmaps

    struct Rgb
    {
        std::uint8_t r, g, b;
        bool operator==(const Rgb &) const = default;
    };

    inline constexpr Rgb kNoCoverageColor{255, 255, 255}; // Z
    inline constexpr Rgb kBuildingColor{96, 96, 96};      // B
    inline constexpr Rgb kNoValueColor{0, 0, 0};          // covered, value undefined

    // Viridis, sampled at 9 stops
    inline Rgb palette_color(double t)
    {
        static constexpr std::array<std::array<double, 3>, 9> stops{{{68, 1, 84},
                                                                     {71, 44, 122},
                                                                     {59, 81, 139},
                                                                     {44, 113, 142},
                                                                     {33, 144, 141},
                                                                     {39, 173, 129},
                                                                     {92, 200, 99},
                                                                     {170, 220, 50},
                                                                     {253, 231, 37}}};
        t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
        const double x = t * (stops.size() - 1);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(x), stops.size() - 2);
        const double f = x - static_cast<double>(i);
        auto mix = [&](int ch) {
            return static_cast<std::uint8_t>(std::lround(stops[i][ch] * (1.0 - f) + stops[i + 1][ch] * f));
        };
        return {mix(0), mix(1), mix(2)};
    }

    struct Raster
    {
        std::size_t width = 0;
        std::size_t height = 0;
        std::vector<Rgb> pixels; // row-major, row 0 at the top

        const Rgb &at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    };

    struct HeatmapCell
    {
        SiteFlag flag = SiteFlag::no_coverage;
        std::optional<double> value;
    };

    struct HeatmapScale
    {
        double min = 0.0;
        double max = 1.0;
    };

    // Data range over finite values of the covered cells
    inline HeatmapScale data_scale(std::span<const HeatmapCell> cells)
    {
        bool any = false;
        HeatmapScale s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (const auto &c : cells)
            if (c.flag == SiteFlag::covered && c.value && std::isfinite(*c.value))
            {
                s.min = std::min(s.min, *c.value);
                s.max = std::max(s.max, *c.value);
                any = true;
            }
        return any ? s : HeatmapScale{};
    }

    // One block x block pixel square per grid cell; grid row iy = ny-1 (north) is drawn at the top
    inline Raster emit_heatmap(std::span<const HeatmapCell> cells, std::size_t nx, std::size_t ny, const HeatmapScale &scale,
                               std::size_t block = 8)
    {
        if (cells.size() != nx * ny)
            throw std::invalid_argument("heatmap: cell count does not match grid");
        Raster r{nx * block, ny * block, {}};
        r.pixels.resize(r.width * r.height);
        const double span = scale.max - scale.min;
        for (std::size_t iy = 0; iy < ny; ++iy)
            for (std::size_t ix = 0; ix < nx; ++ix)
            {
                const HeatmapCell &c = cells[iy * nx + ix];
                Rgb color = kNoValueColor;
                if (c.flag == SiteFlag::no_coverage)
                    color = kNoCoverageColor;
                else if (c.flag == SiteFlag::inside_building)
                    color = kBuildingColor;
                else if (c.value && std::isfinite(*c.value))
                    color = palette_color(span > 0.0 ? (*c.value - scale.min) / span : 0.5);
                const std::size_t top = (ny - 1 - iy) * block;
                for (std::size_t y = top; y < top + block; ++y)
                    for (std::size_t x = ix * block; x < (ix + 1) * block; ++x)
                        r.pixels[y * r.width + x] = color;
            }
        return r;
    }

    inline void write_png(const Raster &raster, const std::filesystem::path &path)
    {
        std::unique_ptr<FILE, int (*)(FILE *)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
        if (!fp)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info)
        {
            png_destroy_write_struct(&png, &info);
            throw std::runtime_error("libpng initialisation failed");
        }
        if (setjmp(png_jmpbuf(png)))
        {
            png_destroy_write_struct(&png, &info);
            throw std::runtime_error("libpng failed writing " + path.string());
        }
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, static_cast<png_uint_32>(raster.width), static_cast<png_uint_32>(raster.height), 8,
                     PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        static_assert(sizeof(Rgb) == 3);
        for (std::size_t y = 0; y < raster.height; ++y)
        {
            auto *row = const_cast<png_bytep>(reinterpret_cast<const png_byte *>(&raster.pixels[y * raster.width]));
            png_write_row(png, row);
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }

    // Named per-site layers drawn for every altitude
    struct LayerView
    {
        std::string name;
        std::vector<HeatmapCell> cells;
        HeatmapScale scale;
    };

    inline std::vector<LayerView> heatmap_layers(const SweepResult &result, const LayerResult &layer, int max_rank)
    {
        std::vector<LayerView> views;
        auto make = [&](std::string name, auto &&value_of, std::optional<HeatmapScale> fixed)
        {
            LayerView v{std::move(name), {}, {}};
            v.cells.reserve(layer.sites.size());
            for (const auto &s : layer.sites)
                v.cells.push_back({s.flag, s.covered() ? value_of(s) : std::nullopt});
            v.scale = fixed ? *fixed : data_scale(v.cells);
            views.push_back(std::move(v));
        };
        make("rssi", [](const SiteResult &s) { return s.rssi_dbm; }, std::nullopt);
        for (std::size_t c = 0; c < result.criteria.size(); ++c)
            make("rank_" + result.criteria[c].label,
                 [c](const SiteResult &s) -> std::optional<double> {
                     return c < s.ranks.size() ? std::optional<double>(s.ranks[c]) : std::nullopt;
                 },
                 HeatmapScale{0.0, static_cast<double>(max_rank)});
        make("cn", [](const SiteResult &s) { return s.cn_db; }, std::nullopt);
        return views;
    }

    inline std::string altitude_tag(double altitude) { return "alt" + format_double(altitude) + "m"; }
}

#endif
