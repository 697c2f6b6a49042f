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

#ifndef UAVMIMO_PROPAGATION_HPP
#define UAVMIMO_PROPAGATION_HPP

#include "geometry.hpp"
#include "ingest.hpp"

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace uavmimo
{
    using cdouble = std::complex<double>;

    inline constexpr double kVacuumPermittivity = 8.8541878128e-12; // F/m

    enum class Polarization
    {
        perpendicular, // E normal to the plane of incidence (TE)
        parallel       // E in the plane of incidence (TM)
    };

    enum class SiteFlag
    {
        covered,
        no_coverage,    // Z: outdoors, no path reaches the receiver
        inside_building // B
    };

    // One specular path. Directions are directions of travel.
    struct PropPath
    {
        std::vector<Vec3> points;     // tx, interaction points..., rx
        std::vector<FacetId> facets;  // one per interaction point
        double length = 0.0;          // unfolded length, m
        Vec3 dep_dir = Vec3::Zero();  // leaving the transmitter
        Vec3 arr_dir = Vec3::Zero();  // arriving at the receiver
        cdouble amplitude{0.0, 0.0};  // field ratio incl. spreading, reflections and phase

        int order() const { return static_cast<int>(points.size()) - 2; }
    };

    struct PathSet
    {
        std::vector<PropPath> paths;
        SiteFlag flag = SiteFlag::no_coverage;
    };

    // ------------------------------------------------------------------------
    // Fresnel reflection

    // Complex reflection coefficient for a wave incident from free space.
    // Sign convention: the parallel reference direction is reversed on reflection,
    // so normal incidence gives the same value for both polarizations and a
    // perfect reflector gives -1 for both.
    inline cdouble fresnel_gamma(const Material &material, double cos_theta_i, Polarization pol, double freq_hz)
    {
        if (!(cos_theta_i > 0.0))
            throw std::domain_error("fresnel_gamma: cos(theta_i) must be in (0, 1]");
        if (!(freq_hz > 0.0))
            throw std::domain_error("fresnel_gamma: frequency must be > 0");
        if (material.perfect_reflector)
            return {-1.0, 0.0};
        const double c = std::min(cos_theta_i, 1.0);
        const double sin2 = 1.0 - c * c;
        const cdouble eps(material.rel_permittivity,
                          -material.conductivity / (2.0 * std::numbers::pi * freq_hz * kVacuumPermittivity));
        const cdouble root = std::sqrt(eps - sin2);
        if (pol == Polarization::perpendicular)
            return (c - root) / (c + root);
        return (root - eps * c) / (root + eps * c);
    }

    // ------------------------------------------------------------------------
    // Path amplitude

    namespace detail
    {
        // Vertical polarization for a departing direction; x-hat for vertical departures
        inline Vec3 initial_polarization(const Vec3 &k)
        {
            Vec3 e = Vec3::UnitZ() - k.z() * k;
            if (e.norm() < 1e-9)
                e = Vec3::UnitX() - k.x() * k;
            return e.normalized();
        }

        inline Vec3 any_perpendicular(const Vec3 &k)
        {
            const Vec3 helper = std::abs(k.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
            return k.cross(helper).normalized();
        }
    }

    // (lambda / 4 pi d) * prod(Gamma_i) * exp(-j 2 pi d / lambda).
    // The field vector is carried through each bounce, split into its perpendicular and
    // parallel parts, and the result is read along the geometrically transported
    // polarization (s kept, p_in mapped to p_out). All-perfect paths therefore give
    // prod(Gamma_i) = (-1)^order.
    inline cdouble path_amplitude(const PropPath &path, const Scene &scene, double wavelength)
    {
        const double freq = kSpeedOfLight / wavelength;
        const auto &pts = path.points;
        Vec3 k = (pts[1] - pts[0]).normalized();
        const Vec3 e0 = detail::initial_polarization(k);
        Eigen::Vector3cd field = e0.cast<cdouble>();
        Vec3 reference = e0;

        for (std::size_t i = 0; i < path.facets.size(); ++i)
        {
            const Facet &f = scene.facet(path.facets[i]);
            const Vec3 k_out = (pts[i + 2] - pts[i + 1]).normalized();
            Vec3 n = f.normal();
            if (n.dot(k) > 0.0)
                n = -n; // face the incoming wave
            const double cos_i = std::clamp(-k.dot(n), 0.0, 1.0);

            Vec3 s = k.cross(n);
            if (s.norm() < 1e-12)
                s = detail::any_perpendicular(k);
            s.normalize();
            const Vec3 p_in = s.cross(k);
            const Vec3 p_out = k_out.cross(s);

            const Material &m = scene.material_of(path.facets[i]);
            const cdouble g_perp = fresnel_gamma(m, std::max(cos_i, 1e-300), Polarization::perpendicular, freq);
            const cdouble g_par = fresnel_gamma(m, std::max(cos_i, 1e-300), Polarization::parallel, freq);

            const cdouble a = s.cast<cdouble>().dot(field);
            const cdouble b = p_in.cast<cdouble>().dot(field);
            field = (g_perp * a) * s.cast<cdouble>() + (g_par * b) * p_out.cast<cdouble>();
            reference = reference.dot(s) * s + reference.dot(p_in) * p_out;
            k = k_out;
        }

        const cdouble projection = reference.cast<cdouble>().dot(field); // reference is real
        const double spread = wavelength / (4.0 * std::numbers::pi * path.length);
        const double phase = -2.0 * std::numbers::pi * std::fmod(path.length / wavelength, 1.0);
        return spread * projection * std::polar(1.0, phase);
    }

    // ------------------------------------------------------------------------
    // Specular path enumeration (image method)

    // Fixed-transmitter tracer. Construction caches images and the facet pairs that can
    // form a second-order sequence from this transmitter; trace() is const and reentrant.
    class PathTracer
    {
    public:
        PathTracer(const Scene &scene, const Vec3 &tx, int max_order, std::optional<double> wavelength = std::nullopt)
            : scene_(&scene), tx_(tx), max_order_(max_order), wavelength_(wavelength)
        {
            if (max_order < 0 || max_order > 2)
                throw std::invalid_argument("max_order must be 0, 1 or 2");
            const auto &facets = scene.facets();
            const std::size_t n = facets.size();
            tx_dist_.resize(n);
            images_.resize(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                tx_dist_[i] = facets[i].signed_distance(tx);
                images_[i] = facets[i].mirror(tx);
                if (std::abs(tx_dist_[i]) > kSelfHitEps)
                    first_.push_back(static_cast<FacetId>(i));
            }
            if (max_order < 2)
                return;

            // Which sides of every plane each facet has vertices on: bit0 front, bit1 back
            side_mask_.assign(n * n, 0);
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                {
                    std::uint8_t mask = 0;
                    for (const auto &v : facets[q].vertices())
                    {
                        const double d = facets[p].signed_distance(v);
                        if (d > kSelfHitEps)
                            mask |= 1;
                        else if (d < -kSelfHitEps)
                            mask |= 2;
                    }
                    side_mask_[p * n + q] = mask;
                }

            for (FacetId f1 : first_)
            {
                const std::uint8_t tx_side = tx_dist_[f1] > 0.0 ? 1 : 2;
                for (FacetId f2 = 0; f2 < n; ++f2)
                {
                    if (f2 == f1 || facets[f1].coplanar_with(facets[f2]))
                        continue;
                    // f2 must reach into the half-space of f1 that holds the transmitter
                    if (!(side_mask_[f1 * n + f2] & tx_side))
                        continue;
                    const double d = facets[f2].signed_distance(images_[f1]);
                    if (std::abs(d) <= kSelfHitEps)
                        continue;
                    pairs_.push_back(Pair{f1, f2, images_[f1], facets[f2].mirror(images_[f1]), d});
                }
            }
        }

        const Vec3 &tx() const { return tx_; }
        std::size_t candidate_pairs() const { return pairs_.size(); }

        PathSet trace(const Vec3 &rx) const
        {
            PathSet out;
            if ((rx - tx_).norm() <= 0.0)
                throw std::invalid_argument("trace: tx and rx coincide");
            if (is_inside_building(rx, *scene_))
            {
                out.flag = SiteFlag::inside_building;
                return out;
            }

            const Scene &scene = *scene_;
            const auto &facets = scene.facets();

            if (!occluded(tx_, rx, scene))
                out.paths.push_back(make_path({tx_, rx}, {}));

            if (max_order_ >= 1)
            {
                for (FacetId f : first_)
                {
                    const Facet &facet = facets[f];
                    const double d_tx = tx_dist_[f];
                    const double d_rx = facet.signed_distance(rx);
                    if (std::abs(d_rx) <= kSelfHitEps || (d_rx > 0.0) != (d_tx > 0.0))
                        continue;
                    // image sits at -d_tx; the segment image->rx crosses the plane
                    const double u = d_tx / (d_tx + d_rx);
                    const Vec3 p = images_[f] + u * (rx - images_[f]);
                    if (!facet.contains(p))
                        continue;
                    const FacetId ex[1] = {f};
                    if (occluded(tx_, p, scene, ex) || occluded(p, rx, scene, ex))
                        continue;
                    add_unique(out.paths, make_path({tx_, p, rx}, {f}));
                }
            }

            if (max_order_ >= 2)
            {
                const std::size_t n = facets.size();
                for (const Pair &pr : pairs_)
                {
                    const Facet &f1 = facets[pr.f1];
                    const Facet &f2 = facets[pr.f2];
                    const double d_rx2 = f2.signed_distance(rx);
                    // receiver and first image on the same side of the second plane
                    if (std::abs(d_rx2) <= kSelfHitEps || (d_rx2 > 0.0) != (pr.img1_dist2 > 0.0))
                        continue;
                    // first facet must reach into the receiver's half-space of the second plane
                    if (!(side_mask_[pr.f2 * n + pr.f1] & (d_rx2 > 0.0 ? 1 : 2)))
                        continue;
                    const double u2 = pr.img1_dist2 / (pr.img1_dist2 + d_rx2);
                    const Vec3 p2 = pr.img2 + u2 * (rx - pr.img2);
                    if (!f2.contains(p2))
                        continue;

                    const double d_tx1 = tx_dist_[pr.f1];
                    const double d_p2 = f1.signed_distance(p2);
                    if (std::abs(d_p2) <= kSelfHitEps || (d_p2 > 0.0) != (d_tx1 > 0.0))
                        continue;
                    const double u1 = d_tx1 / (d_tx1 + d_p2);
                    const Vec3 p1 = pr.img1 + u1 * (p2 - pr.img1);
                    if (!f1.contains(p1))
                        continue;

                    const FacetId ex1[1] = {pr.f1};
                    const FacetId ex12[2] = {pr.f1, pr.f2};
                    const FacetId ex2[1] = {pr.f2};
                    if (occluded(tx_, p1, scene, ex1) || occluded(p1, p2, scene, ex12) || occluded(p2, rx, scene, ex2))
                        continue;
                    add_unique(out.paths, make_path({tx_, p1, p2, rx}, {pr.f1, pr.f2}));
                }
            }

            out.flag = out.paths.empty() ? SiteFlag::no_coverage : SiteFlag::covered;
            return out;
        }

    private:
        struct Pair
        {
            FacetId f1, f2;
            Vec3 img1;         // tx mirrored in f1
            Vec3 img2;         // img1 mirrored in f2
            double img1_dist2; // signed distance of img1 from f2
        };

        PropPath make_path(std::vector<Vec3> points, std::vector<FacetId> facets) const
        {
            PropPath p;
            p.points = std::move(points);
            p.facets = std::move(facets);
            for (std::size_t i = 0; i + 1 < p.points.size(); ++i)
                p.length += (p.points[i + 1] - p.points[i]).norm();
            p.dep_dir = (p.points[1] - p.points[0]).normalized();
            p.arr_dir = (p.points.back() - p.points[p.points.size() - 2]).normalized();
            if (wavelength_)
                p.amplitude = path_amplitude(p, *scene_, *wavelength_);
            return p;
        }

        // Coplanar roof pieces can yield the same specular point twice; keep the first
        static void add_unique(std::vector<PropPath> &paths, PropPath &&p)
        {
            for (const auto &q : paths)
            {
                if (q.points.size() != p.points.size())
                    continue;
                bool same = true;
                for (std::size_t i = 1; i + 1 < p.points.size() && same; ++i)
                    same = (q.points[i] - p.points[i]).norm() < 1e-7;
                if (same)
                    return;
            }
            paths.push_back(std::move(p));
        }

        const Scene *scene_;
        Vec3 tx_;
        int max_order_;
        std::optional<double> wavelength_;
        std::vector<double> tx_dist_;
        std::vector<Vec3> images_;
        std::vector<FacetId> first_;
        std::vector<std::uint8_t> side_mask_;
        std::vector<Pair> pairs_;
    };

    // Paths come back ordered by reflection order, then by facet ids.
    // Amplitudes are filled in when a wavelength is given.
    inline PathSet enumerate_paths(const Vec3 &tx, const Vec3 &rx, const Scene &scene, int max_order,
                                   std::optional<double> wavelength = std::nullopt)
    {
        return PathTracer(scene, tx, max_order, wavelength).trace(rx);
    }

    // ------------------------------------------------------------------------
    // RSSI

    inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

    // Received power in dBm; nullopt for an empty path set, -inf for exact cancellation
    inline std::optional<double> rssi_dbm(const PathSet &set, double tx_power_w, RssiMode mode = RssiMode::coherent)
    {
        if (!(tx_power_w > 0.0))
            throw std::invalid_argument("rssi: transmit power must be > 0");
        if (set.paths.empty())
            return std::nullopt;
        double gain = 0.0;
        if (mode == RssiMode::coherent)
        {
            cdouble sum{0.0, 0.0};
            for (const auto &p : set.paths)
                sum += p.amplitude;
            gain = std::norm(sum);
        }
        else
        {
            for (const auto &p : set.paths)
                gain += std::norm(p.amplitude);
        }
        if (gain == 0.0)
            return -std::numeric_limits<double>::infinity();
        return watts_to_dbm(tx_power_w * gain);
    }
}

#endif
