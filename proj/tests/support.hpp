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

// Test-only helpers: random scenes and independent reference implementations.
// Nothing in here is used by the library itself.

#ifndef UAVMIMO_TEST_SUPPORT_HPP
#define UAVMIMO_TEST_SUPPORT_HPP

#include "uavmimo/app.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace uavmimo::test
{
    inline Material concrete() { return material_by_name("concrete", 3.4e9); }
    inline Material pec() { return material_by_name("perfect_reflector", 3.4e9); }

    inline constexpr double kLambda34 = kSpeedOfLight / 3.4e9;

    inline Building box_building(double cx, double cy, double w, double d, double h, std::string id = "b")
    {
        return Building{{Vec2(cx - w / 2, cy - d / 2), Vec2(cx + w / 2, cy - d / 2), Vec2(cx + w / 2, cy + d / 2),
                         Vec2(cx - w / 2, cy + d / 2)},
                        h, std::move(id)};
    }

    // Rotated rectangles plus the occasional L-shaped (concave) footprint
    inline std::vector<Building> random_buildings(std::mt19937_64 &rng, int count, double half_extent = 200.0)
    {
        std::uniform_real_distribution<double> pos(-half_extent, half_extent), size(8.0, 40.0), height(5.0, 40.0),
            angle(0.0, std::numbers::pi), coin(0.0, 1.0);
        std::vector<Building> out;
        for (int i = 0; i < count; ++i)
        {
            const Vec2 c(pos(rng), pos(rng));
            const double w = size(rng), d = size(rng), a = angle(rng);
            std::vector<Vec2> local;
            if (coin(rng) < 0.25)
                local = {Vec2(0, 0), Vec2(w, 0), Vec2(w, d / 2), Vec2(w / 2, d / 2), Vec2(w / 2, d), Vec2(0, d)};
            else
                local = {Vec2(0, 0), Vec2(w, 0), Vec2(w, d), Vec2(0, d)};
            const Eigen::Rotation2Dd rot(a);
            std::vector<Vec2> fp;
            for (const auto &p : local)
                fp.push_back(c + rot * (p - Vec2(w / 2, d / 2)));
            out.push_back(Building{fp, height(rng), "r" + std::to_string(i)});
        }
        return out;
    }

    inline Scene random_scene(std::mt19937_64 &rng, int count, const Material &building = concrete(),
                              const Material &ground = concrete(), double half_extent = 200.0)
    {
        const double pad = half_extent + 60.0;
        return Scene(random_buildings(rng, count, half_extent), building, ground, Bounds2{Vec2(-pad, -pad), Vec2(pad, pad)});
    }

    inline Vec3 random_unit(std::mt19937_64 &rng)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        Vec3 v;
        do
            v = Vec3(n(rng), n(rng), n(rng));
        while (v.norm() < 1e-6);
        return v.normalized();
    }

    // Random outdoor point above ground
    inline Vec3 random_outdoor_point(std::mt19937_64 &rng, const Scene &scene, double half_extent, double zmin,
                                     double zmax)
    {
        std::uniform_real_distribution<double> xy(-half_extent, half_extent), z(zmin, zmax);
        for (;;)
        {
            const Vec3 p(xy(rng), xy(rng), z(rng));
            if (!is_inside_building(p, scene))
                return p;
        }
    }

    // ------------------------------------------------------------------------
    // Eigenvalues of the Gram matrix H H^* by cyclic Jacobi on the real 2n x 2n
    // embedding [[Re, -Im], [Im, Re]], in long double. Each eigenvalue of the
    // Hermitian matrix appears twice in the embedding.

    inline std::vector<long double> gram_eigenvalues(const Eigen::MatrixXcd &h)
    {
        const std::size_t n = static_cast<std::size_t>(h.rows());
        std::vector<std::complex<long double>> g(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                std::complex<long double> s = 0;
                for (Eigen::Index k = 0; k < h.cols(); ++k)
                    s += std::complex<long double>(h(Eigen::Index(i), k)) *
                         std::conj(std::complex<long double>(h(Eigen::Index(j), k)));
                g[i * n + j] = s;
            }

        const std::size_t m = 2 * n;
        std::vector<long double> a(m * m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
            {
                a[i * m + j] = g[i * n + j].real();
                a[i * m + (j + n)] = -g[i * n + j].imag();
                a[(i + n) * m + j] = g[i * n + j].imag();
                a[(i + n) * m + (j + n)] = g[i * n + j].real();
            }

        for (int sweep = 0; sweep < 100; ++sweep)
        {
            long double off = 0, diag = 0;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    (i == j ? diag : off) += a[i * m + j] * a[i * m + j];
            if (off <= 1e-40L * diag || off == 0)
                break;
            for (std::size_t p = 0; p + 1 < m; ++p)
                for (std::size_t q = p + 1; q < m; ++q)
                {
                    const long double apq = a[p * m + q];
                    if (apq == 0)
                        continue;
                    const long double theta = (a[q * m + q] - a[p * m + p]) / (2 * apq);
                    const long double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
                    const long double c = 1 / std::sqrt(t * t + 1), s = t * c;
                    for (std::size_t k = 0; k < m; ++k)
                    {
                        const long double akp = a[k * m + p], akq = a[k * m + q];
                        a[k * m + p] = c * akp - s * akq;
                        a[k * m + q] = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < m; ++k)
                    {
                        const long double apk = a[p * m + k], aqk = a[q * m + k];
                        a[p * m + k] = c * apk - s * aqk;
                        a[q * m + k] = s * apk + c * aqk;
                    }
                }
        }
        std::vector<long double> ev(m);
        for (std::size_t i = 0; i < m; ++i)
            ev[i] = a[i * m + i];
        std::sort(ev.begin(), ev.end(), std::greater<>());
        std::vector<long double> out;
        for (std::size_t i = 0; i < m; i += 2)
            out.push_back(std::max<long double>(0, 0.5L * (ev[i] + ev[i + 1])));
        return out;
    }

    // ------------------------------------------------------------------------
    // Analytic two-ray model over a perfectly reflecting ground, in dBm

    inline double two_ray_dbm(double p_tx_w, double freq_hz, double h_tx, double h_rx, double dist)
    {
        using ld = long double;
        const ld lambda = ld(kSpeedOfLight) / ld(freq_hz);
        const ld d1 = std::sqrt(ld(dist) * dist + ld(h_rx - h_tx) * (h_rx - h_tx));
        const ld d2 = std::sqrt(ld(dist) * dist + ld(h_rx + h_tx) * (h_rx + h_tx));
        const ld pi = std::numbers::pi_v<long double>;
        auto phasor = [&](ld d) { return std::polar<ld>(1 / d, -2 * pi * std::fmod(d / lambda, ld(1))); };
        const ld g = (lambda / (4 * pi)) * (lambda / (4 * pi)) * std::norm(phasor(d1) - phasor(d2));
        return double(10 * std::log10(ld(p_tx_w) * g) + 30);
    }

    // ------------------------------------------------------------------------
    // Unpruned image-method enumeration: every facet, every ordered facet pair

    struct RefPath
    {
        std::vector<FacetId> facets;
        double length;
        std::vector<Vec3> points;
    };

    inline std::vector<RefPath> brute_force_paths(const Vec3 &tx, const Vec3 &rx, const Scene &scene, int max_order)
    {
        std::vector<RefPath> out;
        if (is_inside_building(rx, scene))
            return out;
        const auto &facets = scene.facets();
        auto cross_plane = [](const Facet &f, const Vec3 &a, const Vec3 &b) -> std::optional<Vec3>
        {
            const double da = f.signed_distance(a), db = f.signed_distance(b);
            if (std::abs(da) <= kSelfHitEps || std::abs(db) <= kSelfHitEps || (da > 0) == (db > 0))
                return std::nullopt;
            return a + (da / (da - db)) * (b - a);
        };
        auto add = [&](RefPath p)
        {
            for (const auto &q : out)
                if (q.points.size() == p.points.size())
                {
                    bool same = true;
                    for (std::size_t i = 1; i + 1 < p.points.size() && same; ++i)
                        same = (q.points[i] - p.points[i]).norm() < 1e-7;
                    if (same)
                        return;
                }
            out.push_back(std::move(p));
        };

        if (!occluded(tx, rx, scene))
            add({{}, (rx - tx).norm(), {tx, rx}});
        if (max_order >= 1)
            for (FacetId f = 0; f < facets.size(); ++f)
            {
                const Vec3 img = facets[f].mirror(tx);
                const auto p = cross_plane(facets[f], img, rx);
                if (!p || !facets[f].contains(*p))
                    continue;
                const FacetId ex[1] = {f};
                if (occluded(tx, *p, scene, ex) || occluded(*p, rx, scene, ex))
                    continue;
                add({{f}, (img - rx).norm(), {tx, *p, rx}});
            }
        if (max_order >= 2)
            for (FacetId f1 = 0; f1 < facets.size(); ++f1)
                for (FacetId f2 = 0; f2 < facets.size(); ++f2)
                {
                    if (f1 == f2)
                        continue;
                    const Vec3 img1 = facets[f1].mirror(tx);
                    const Vec3 img2 = facets[f2].mirror(img1);
                    const auto p2 = cross_plane(facets[f2], img2, rx);
                    if (!p2 || !facets[f2].contains(*p2))
                        continue;
                    const auto p1 = cross_plane(facets[f1], img1, *p2);
                    if (!p1 || !facets[f1].contains(*p1))
                        continue;
                    const FacetId e1[1] = {f1}, e12[2] = {f1, f2}, e2[1] = {f2};
                    if (occluded(tx, *p1, scene, e1) || occluded(*p1, *p2, scene, e12) || occluded(*p2, rx, scene, e2))
                        continue;
                    add({{f1, f2}, (img2 - rx).norm(), {tx, *p1, *p2, rx}});
                }
        return out;
    }

    // ------------------------------------------------------------------------
    // Exact per-element channel: each element pair gets its own image-source path
    // length through the same facet sequence; no plane-wave approximation

    inline Eigen::MatrixXcd exact_element_channel(const PathSet &paths, const ArrayConfig &tx, const ArrayConfig &rx,
                                                  const Scene &scene, double wavelength)
    {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rx.n_elements, tx.n_elements);
        for (const auto &p : paths.paths)
        {
            // amplitude without its propagation phase and spreading
            const cdouble gain = p.amplitude / std::polar(wavelength / (4.0 * std::numbers::pi * p.length),
                                                          -2.0 * std::numbers::pi * std::fmod(p.length / wavelength, 1.0));
            for (int kt = 0; kt < tx.n_elements; ++kt)
            {
                Vec3 src = p.points.front() + (tx.element_position(kt, wavelength) - tx.reference);
                for (FacetId f : p.facets)
                    src = scene.facet(f).mirror(src);
                for (int kr = 0; kr < rx.n_elements; ++kr)
                {
                    const Vec3 dst = p.points.back() + (rx.element_position(kr, wavelength) - rx.reference);
                    const double d = (dst - src).norm();
                    h(kr, kt) += gain * std::polar(wavelength / (4.0 * std::numbers::pi * d),
                                                   -2.0 * std::numbers::pi * std::fmod(d / wavelength, 1.0));
                }
            }
        }
        return h;
    }

    inline Eigen::MatrixXcd random_complex_matrix(std::mt19937_64 &rng, int rows, int cols)
    {
        std::normal_distribution<double> n(0.0, 1.0);
        Eigen::MatrixXcd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = cdouble(n(rng), n(rng));
        return m;
    }

    inline std::filesystem::path scratch_dir(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / ("uavmimo_test_" + name);
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
        return dir;
    }

    inline void write_text(const std::filesystem::path &path, const std::string &text)
    {
        std::ofstream(path, std::ios::binary) << text;
    }
}

#endif
