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

#ifndef UAVMIMO_GEOMETRY_HPP
#define UAVMIMO_GEOMETRY_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavmimo
{
    using Vec2 = Eigen::Vector2d;
    using Vec3 = Eigen::Vector3d;
    using FacetId = std::uint32_t;

    // Ray-origin offset after each interaction, in meters
    inline constexpr double kSelfHitEps = 1e-6;

    // Tolerances used when validating and querying facets, in meters
    inline constexpr double kPlaneTol = 1e-9;
    inline constexpr double kEdgeTol = 1e-9;

    // ------------------------------------------------------------------------
    // Materials

    struct Material
    {
        std::string name = "vacuum";
        double rel_permittivity = 1.0; // Real relative permittivity, >= 1
        double conductivity = 0.0;     // S/m, >= 0
        bool perfect_reflector = false; // Forces |Gamma| = 1

        void validate() const
        {
            if (!(rel_permittivity >= 1.0) || !std::isfinite(rel_permittivity))
                throw std::invalid_argument("material '" + name + "': relative permittivity must be >= 1");
            if (!(conductivity >= 0.0) || !std::isfinite(conductivity))
                throw std::invalid_argument("material '" + name + "': conductivity must be >= 0");
        }
    };

    // ------------------------------------------------------------------------
    // 2D polygon helpers (footprints, projected facets)

    namespace poly
    {
        inline double cross(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

        // Twice the signed area, positive for counter-clockwise rings
        inline double signed_area2(std::span<const Vec2> ring)
        {
            double s = 0.0;
            for (std::size_t i = 0, n = ring.size(); i < n; ++i)
                s += cross(ring[i], ring[(i + 1) % n]);
            return s;
        }

        inline double point_segment_distance(const Vec2 &p, const Vec2 &a, const Vec2 &b)
        {
            const Vec2 ab = b - a;
            const double len2 = ab.squaredNorm();
            double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            return (a + t * ab - p).norm();
        }

        inline bool on_boundary(const Vec2 &p, std::span<const Vec2> ring, double tol = kEdgeTol)
        {
            for (std::size_t i = 0, n = ring.size(); i < n; ++i)
                if (point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= tol)
                    return true;
            return false;
        }

        // Crossing-number test; boundary handling is left to the caller
        inline bool crossing_inside(const Vec2 &p, std::span<const Vec2> ring)
        {
            bool inside = false;
            for (std::size_t i = 0, n = ring.size(), j = n - 1; i < n; j = i++)
            {
                const Vec2 &a = ring[i];
                const Vec2 &b = ring[j];
                if ((a.y() > p.y()) != (b.y() > p.y()))
                {
                    const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
                    if (p.x() < x)
                        inside = !inside;
                }
            }
            return inside;
        }

        inline bool strictly_inside(const Vec2 &p, std::span<const Vec2> ring)
        {
            return !on_boundary(p, ring) && crossing_inside(p, ring);
        }

        inline int orient(const Vec2 &a, const Vec2 &b, const Vec2 &c)
        {
            const double v = cross(b - a, c - a);
            const double scale = std::max({(b - a).norm(), (c - a).norm(), 1.0});
            if (v > 1e-12 * scale * scale)
                return 1;
            if (v < -1e-12 * scale * scale)
                return -1;
            return 0;
        }

        inline bool on_segment(const Vec2 &a, const Vec2 &b, const Vec2 &p)
        {
            return std::min(a.x(), b.x()) - 1e-12 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-12 &&
                   std::min(a.y(), b.y()) - 1e-12 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-12;
        }

        inline bool segments_intersect(const Vec2 &p1, const Vec2 &p2, const Vec2 &q1, const Vec2 &q2)
        {
            const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
            const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
            if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0)
                return true;
            if (o1 == 0 && on_segment(p1, p2, q1))
                return true;
            if (o2 == 0 && on_segment(p1, p2, q2))
                return true;
            if (o3 == 0 && on_segment(q1, q2, p1))
                return true;
            if (o4 == 0 && on_segment(q1, q2, p2))
                return true;
            return false;
        }

        // True when no two non-adjacent edges touch and the ring has positive area
        inline bool is_simple(std::span<const Vec2> ring)
        {
            const std::size_t n = ring.size();
            if (n < 3 || std::abs(signed_area2(ring)) <= 1e-12)
                return false;
            for (std::size_t i = 0; i < n; ++i)
            {
                if ((ring[i] - ring[(i + 1) % n]).norm() <= 1e-12)
                    return false;
                for (std::size_t j = i + 1; j < n; ++j)
                {
                    const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
                    if (adjacent)
                        continue;
                    if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]))
                        return false;
                }
            }
            return true;
        }

        inline bool is_convex(std::span<const Vec2> ring)
        {
            const std::size_t n = ring.size();
            int sign = 0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const int o = orient(ring[i], ring[(i + 1) % n], ring[(i + 2) % n]);
                if (o == 0)
                    continue;
                if (sign == 0)
                    sign = o;
                else if (o != sign)
                    return false;
            }
            return sign != 0;
        }

        // Drops a closing duplicate, repeated vertices and collinear vertices; returns a CCW ring
        inline std::vector<Vec2> normalize_ring(std::vector<Vec2> ring)
        {
            if (ring.size() >= 2 && (ring.front() - ring.back()).norm() <= 1e-12)
                ring.pop_back();
            std::vector<Vec2> out;
            for (const auto &p : ring)
                if (out.empty() || (out.back() - p).norm() > 1e-12)
                    out.push_back(p);
            if (out.size() >= 2 && (out.front() - out.back()).norm() <= 1e-12)
                out.pop_back();

            bool changed = true;
            while (changed && out.size() >= 3)
            {
                changed = false;
                for (std::size_t i = 0; i < out.size(); ++i)
                {
                    const std::size_t n = out.size();
                    const Vec2 &a = out[(i + n - 1) % n];
                    const Vec2 &b = out[i];
                    const Vec2 &c = out[(i + 1) % n];
                    if (orient(a, b, c) == 0 && (b - a).dot(c - b) >= 0.0)
                    {
                        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
                        changed = true;
                        break;
                    }
                }
            }
            if (out.size() >= 3 && signed_area2(out) < 0.0)
                std::reverse(out.begin(), out.end());
            return out;
        }

        // Ear clipping of a simple CCW ring into triangles
        inline std::vector<std::array<Vec2, 3>> ear_clip(std::span<const Vec2> ring)
        {
            std::vector<std::array<Vec2, 3>> tris;
            std::vector<std::size_t> idx(ring.size());
            std::iota(idx.begin(), idx.end(), 0);

            auto in_triangle = [](const Vec2 &p, const Vec2 &a, const Vec2 &b, const Vec2 &c)
            {
                return orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0;
            };

            std::size_t guard = 0;
            while (idx.size() > 3 && guard < 10 * ring.size() * ring.size())
            {
                ++guard;
                bool clipped = false;
                for (std::size_t i = 0; i < idx.size(); ++i)
                {
                    const std::size_t n = idx.size();
                    const Vec2 &a = ring[idx[(i + n - 1) % n]];
                    const Vec2 &b = ring[idx[i]];
                    const Vec2 &c = ring[idx[(i + 1) % n]];
                    if (orient(a, b, c) <= 0)
                        continue;
                    bool ear = true;
                    for (std::size_t j = 0; j < n && ear; ++j)
                    {
                        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n)
                            continue;
                        const Vec2 &p = ring[idx[j]];
                        if ((p - a).norm() <= 1e-12 || (p - b).norm() <= 1e-12 || (p - c).norm() <= 1e-12)
                            continue;
                        if (in_triangle(p, a, b, c))
                            ear = false;
                    }
                    if (!ear)
                        continue;
                    tris.push_back({a, b, c});
                    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
                    clipped = true;
                    break;
                }
                if (!clipped)
                    throw std::invalid_argument("ear clipping failed: footprint is not a simple polygon");
            }
            if (idx.size() == 3)
                tris.push_back({ring[idx[0]], ring[idx[1]], ring[idx[2]]});
            return tris;
        }
    }

    // ------------------------------------------------------------------------
    // Axis-aligned box

    struct Aabb
    {
        Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

        void extend(const Vec3 &p)
        {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        void extend(const Aabb &b)
        {
            lo = lo.cwiseMin(b.lo);
            hi = hi.cwiseMax(b.hi);
        }
        Vec3 center() const { return 0.5 * (lo + hi); }

        // Slab test against [t0, t1]; zero direction components are handled explicitly
        bool hit(const Vec3 &origin, const Vec3 &dir, double t0, double t1) const
        {
            for (int a = 0; a < 3; ++a)
            {
                if (std::abs(dir[a]) < 1e-300)
                {
                    if (origin[a] < lo[a] || origin[a] > hi[a])
                        return false;
                    continue;
                }
                const double inv = 1.0 / dir[a];
                double ta = (lo[a] - origin[a]) * inv;
                double tb = (hi[a] - origin[a]) * inv;
                if (ta > tb)
                    std::swap(ta, tb);
                t0 = std::max(t0, ta);
                t1 = std::min(t1, tb);
                if (t0 > t1)
                    return false;
            }
            return true;
        }
    };

    // ------------------------------------------------------------------------
    // Facet: convex planar polygon with a material index

    struct RayHit
    {
        double t;
        Vec3 point;
    };

    class Facet
    {
    public:
        Facet(std::vector<Vec3> vertices, std::size_t material)
            : vertices_(std::move(vertices)), material_(material)
        {
            if (vertices_.size() < 3)
                throw std::invalid_argument("facet needs at least 3 vertices");

            // Newell normal
            Vec3 n = Vec3::Zero();
            for (std::size_t i = 0, m = vertices_.size(); i < m; ++i)
                n += vertices_[i].cross(vertices_[(i + 1) % m]);
            const double area2 = n.norm();
            if (!(area2 > 1e-12))
                throw std::invalid_argument("degenerate facet (zero area)");
            normal_ = n / area2;
            offset_ = normal_.dot(vertices_[0]);

            for (const auto &v : vertices_)
                if (std::abs(normal_.dot(v) - offset_) > kPlaneTol)
                    throw std::invalid_argument("facet vertices are not coplanar");

            normal_.cwiseAbs().maxCoeff(&drop_axis_);
            const int u = (drop_axis_ + 1) % 3, w = (drop_axis_ + 2) % 3;
            proj_.reserve(vertices_.size());
            for (const auto &v : vertices_)
                proj_.emplace_back(v[u], v[w]);
            if (poly::signed_area2(proj_) < 0.0)
                std::reverse(proj_.begin(), proj_.end());
            if (!poly::is_convex(proj_))
                throw std::invalid_argument("facet polygon is not convex");

            for (const auto &v : vertices_)
                box_.extend(v);
            box_.lo.array() -= 1e-7;
            box_.hi.array() += 1e-7;
        }

        const std::vector<Vec3> &vertices() const { return vertices_; }
        const Vec3 &normal() const { return normal_; }
        double offset() const { return offset_; }
        std::size_t material() const { return material_; }
        const Aabb &box() const { return box_; }

        double signed_distance(const Vec3 &p) const { return normal_.dot(p) - offset_; }

        Vec3 mirror(const Vec3 &p) const { return p - 2.0 * signed_distance(p) * normal_; }

        // Inclusive containment of a point already on the facet plane
        bool contains(const Vec3 &p) const
        {
            const int u = (drop_axis_ + 1) % 3, w = (drop_axis_ + 2) % 3;
            const Vec2 q(p[u], p[w]);
            for (std::size_t i = 0, n = proj_.size(); i < n; ++i)
            {
                const Vec2 &a = proj_[i];
                const Vec2 e = proj_[(i + 1) % n] - a;
                if (poly::cross(e, q - a) < -kEdgeTol * e.norm())
                    return false;
            }
            return true;
        }

        bool coplanar_with(const Facet &other) const
        {
            return std::abs(std::abs(normal_.dot(other.normal_)) - 1.0) < 1e-12 &&
                   std::abs(signed_distance(other.vertices_[0])) < kPlaneTol;
        }

    private:
        std::vector<Vec3> vertices_;
        std::size_t material_;
        Vec3 normal_;
        double offset_ = 0.0;
        int drop_axis_ = 2;
        std::vector<Vec2> proj_;
        Aabb box_;
    };

    // Smallest t in (kSelfHitEps, t_max) with origin + t*dir inside the facet
    inline std::optional<RayHit> ray_facet_intersect(const Vec3 &origin, const Vec3 &dir, const Facet &facet,
                                                     double t_max = std::numeric_limits<double>::infinity())
    {
        const double denom = facet.normal().dot(dir);
        if (std::abs(denom) < 1e-15)
            return std::nullopt;
        const double t = -facet.signed_distance(origin) / denom;
        if (!(t > kSelfHitEps) || !(t < t_max))
            return std::nullopt;
        const Vec3 p = origin + t * dir;
        if (!facet.contains(p))
            return std::nullopt;
        return RayHit{t, p};
    }

    // ------------------------------------------------------------------------
    // Buildings and scene

    struct Building
    {
        std::vector<Vec2> footprint; // ENU meters, simple polygon
        double height = 0.0;         // meters above ground
        std::string id;
    };

    struct Bounds2
    {
        Vec2 min = Vec2::Zero();
        Vec2 max = Vec2::Zero();
    };

    struct SceneHit
    {
        FacetId facet;
        double t;
        Vec3 point;
    };

    enum class FacetKind : std::uint8_t
    {
        ground,
        wall,
        roof
    };

    class Scene
    {
    public:
        // Facet 0 is the ground rectangle (when present); each building then contributes its
        // walls followed by its roof piece(s)
        Scene(std::vector<Building> buildings, Material building_material, Material ground_material, Bounds2 bounds,
              bool ground_plane = true)
            : bounds_(bounds)
        {
            building_material.validate();
            ground_material.validate();
            materials_ = {std::move(ground_material), std::move(building_material)};
            if (!(bounds.max.x() > bounds.min.x() && bounds.max.y() > bounds.min.y()))
                throw std::invalid_argument("scene bounds must have positive extent");

            if (ground_plane)
                add_facet({Vec3(bounds.min.x(), bounds.min.y(), 0.0), Vec3(bounds.max.x(), bounds.min.y(), 0.0),
                           Vec3(bounds.max.x(), bounds.max.y(), 0.0), Vec3(bounds.min.x(), bounds.max.y(), 0.0)},
                          0, FacetKind::ground, -1);

            buildings_.reserve(buildings.size());
            for (auto &b : buildings)
            {
                if (!(b.height > 0.0) || !std::isfinite(b.height))
                    throw std::invalid_argument("building '" + b.id + "': height must be > 0");
                b.footprint = poly::normalize_ring(std::move(b.footprint));
                if (!poly::is_simple(b.footprint))
                    throw std::invalid_argument("building '" + b.id + "': footprint is not a simple polygon");

                const int bi = static_cast<int>(buildings_.size());
                const auto &fp = b.footprint;
                const double h = b.height;
                for (std::size_t i = 0, n = fp.size(); i < n; ++i)
                {
                    const Vec2 &a = fp[i];
                    const Vec2 &c = fp[(i + 1) % n];
                    // CCW footprint: this vertex order gives an outward Newell normal
                    add_facet({Vec3(a.x(), a.y(), 0.0), Vec3(c.x(), c.y(), 0.0), Vec3(c.x(), c.y(), h),
                               Vec3(a.x(), a.y(), h)},
                              1, FacetKind::wall, bi);
                }
                if (poly::is_convex(fp))
                {
                    std::vector<Vec3> roof;
                    for (const auto &p : fp)
                        roof.emplace_back(p.x(), p.y(), h);
                    add_facet(std::move(roof), 1, FacetKind::roof, bi);
                }
                else
                {
                    for (const auto &tri : poly::ear_clip(fp))
                        add_facet({Vec3(tri[0].x(), tri[0].y(), h), Vec3(tri[1].x(), tri[1].y(), h),
                                   Vec3(tri[2].x(), tri[2].y(), h)},
                                  1, FacetKind::roof, bi);
                }

                Aabb box;
                for (const auto &p : fp)
                    box.extend(Vec3(p.x(), p.y(), 0.0));
                box.extend(Vec3(fp[0].x(), fp[0].y(), h));
                building_boxes_.push_back(box);
                max_height_ = std::max(max_height_, h);
                buildings_.push_back(std::move(b));
            }
            build_bvh();
        }

        // Free space: no ground, no buildings
        static Scene empty()
        {
            return Scene({}, Material{}, Material{}, Bounds2{Vec2(-1.0, -1.0), Vec2(1.0, 1.0)}, false);
        }

        const std::vector<Facet> &facets() const { return facets_; }
        const Facet &facet(FacetId id) const { return facets_[id]; }
        FacetKind kind(FacetId id) const { return kinds_[id]; }
        int building_of(FacetId id) const { return owners_[id]; }
        const std::vector<Building> &buildings() const { return buildings_; }
        const Material &material(std::size_t index) const { return materials_[index]; }
        const Material &material_of(FacetId id) const { return materials_[facets_[id].material()]; }
        const Material &ground_material() const { return materials_[0]; }
        const Material &building_material() const { return materials_[1]; }
        const Bounds2 &bounds() const { return bounds_; }
        double max_building_height() const { return max_height_; }
        const Aabb &building_box(std::size_t i) const { return building_boxes_[i]; }

        // Nearest hit in (kSelfHitEps, t_max) through the BVH
        std::optional<SceneHit> nearest_hit(const Vec3 &origin, const Vec3 &dir,
                                            double t_max = std::numeric_limits<double>::infinity(),
                                            std::span<const FacetId> exclude = {}) const
        {
            std::optional<SceneHit> best;
            double limit = t_max;
            traverse(origin, dir, limit, [&](FacetId id) {
                if (excluded(id, exclude))
                    return false;
                if (auto h = ray_facet_intersect(origin, dir, facets_[id], limit))
                {
                    if (!best || h->t < best->t || (h->t == best->t && id < best->facet))
                    {
                        best = SceneHit{id, h->t, h->point};
                        limit = std::nextafter(h->t, std::numeric_limits<double>::infinity());
                    }
                }
                return false;
            });
            return best;
        }

        // Reference linear scan, same contract as nearest_hit
        std::optional<SceneHit> nearest_hit_brute(const Vec3 &origin, const Vec3 &dir,
                                                  double t_max = std::numeric_limits<double>::infinity(),
                                                  std::span<const FacetId> exclude = {}) const
        {
            std::optional<SceneHit> best;
            for (FacetId id = 0; id < facets_.size(); ++id)
            {
                if (excluded(id, exclude))
                    continue;
                if (auto h = ray_facet_intersect(origin, dir, facets_[id], t_max))
                    if (!best || h->t < best->t || (h->t == best->t && id < best->facet))
                        best = SceneHit{id, h->t, h->point};
            }
            return best;
        }

        // Any hit strictly inside (kSelfHitEps, t_max)
        bool any_hit(const Vec3 &origin, const Vec3 &dir, double t_max, std::span<const FacetId> exclude = {}) const
        {
            bool found = false;
            double limit = t_max;
            traverse(origin, dir, limit, [&](FacetId id) {
                if (excluded(id, exclude))
                    return false;
                if (ray_facet_intersect(origin, dir, facets_[id], t_max))
                {
                    found = true;
                    return true;
                }
                return false;
            });
            return found;
        }

    private:
        struct Node
        {
            Aabb box;
            std::uint32_t first = 0; // leaf: first index into order_, inner: left child
            std::uint32_t count = 0; // leaf: number of facets, inner: 0
            std::uint32_t right = 0;
        };

        static bool excluded(FacetId id, std::span<const FacetId> exclude)
        {
            return std::find(exclude.begin(), exclude.end(), id) != exclude.end();
        }

        void add_facet(std::vector<Vec3> vertices, std::size_t material, FacetKind kind, int owner)
        {
            facets_.emplace_back(std::move(vertices), material);
            kinds_.push_back(kind);
            owners_.push_back(owner);
        }

        void build_bvh()
        {
            order_.resize(facets_.size());
            std::iota(order_.begin(), order_.end(), FacetId{0});
            nodes_.clear();
            if (facets_.empty())
                return;
            nodes_.reserve(2 * facets_.size());
            build_node(0, static_cast<std::uint32_t>(order_.size()));
        }

        std::uint32_t build_node(std::uint32_t first, std::uint32_t last)
        {
            const auto index = static_cast<std::uint32_t>(nodes_.size());
            nodes_.emplace_back();
            Aabb box, centers;
            for (std::uint32_t i = first; i < last; ++i)
            {
                box.extend(facets_[order_[i]].box());
                centers.extend(facets_[order_[i]].box().center());
            }
            nodes_[index].box = box;
            if (last - first <= 4)
            {
                nodes_[index].first = first;
                nodes_[index].count = last - first;
                return index;
            }
            int axis = 0;
            (centers.hi - centers.lo).maxCoeff(&axis);
            const std::uint32_t mid = first + (last - first) / 2;
            std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + last,
                             [&](FacetId a, FacetId b) {
                                 const double ca = facets_[a].box().center()[axis];
                                 const double cb = facets_[b].box().center()[axis];
                                 return ca < cb || (ca == cb && a < b);
                             });
            const std::uint32_t left = build_node(first, mid);
            const std::uint32_t right = build_node(mid, last);
            nodes_[index].first = left;
            nodes_[index].right = right;
            nodes_[index].count = 0;
            return index;
        }

        // Visits candidate facets; the visitor returns true to stop. `limit` may shrink during traversal.
        template <typename Visit>
        void traverse(const Vec3 &origin, const Vec3 &dir, const double &limit, Visit &&visit) const
        {
            if (nodes_.empty())
                return;
            std::array<std::uint32_t, 64> stack{};
            std::size_t top = 0;
            stack[top++] = 0;
            while (top > 0)
            {
                const Node &node = nodes_[stack[--top]];
                if (!node.box.hit(origin, dir, 0.0, limit))
                    continue;
                if (node.count > 0)
                {
                    for (std::uint32_t i = node.first; i < node.first + node.count; ++i)
                        if (visit(order_[i]))
                            return;
                }
                else
                {
                    stack[top++] = node.right;
                    stack[top++] = node.first;
                }
            }
        }

        std::vector<Facet> facets_;
        std::vector<FacetKind> kinds_;
        std::vector<int> owners_;
        std::vector<Building> buildings_;
        std::vector<Aabb> building_boxes_;
        std::vector<Material> materials_;
        Bounds2 bounds_;
        double max_height_ = 0.0;
        std::vector<FacetId> order_;
        std::vector<Node> nodes_;
    };

    // ------------------------------------------------------------------------
    // Queries

    // True iff the open segment (p, q) crosses a facet outside `exclude`.
    // Endpoints are put in lexicographic order first so the answer is symmetric bit for bit.
    inline bool occluded(const Vec3 &p, const Vec3 &q, const Scene &scene, std::span<const FacetId> exclude = {})
    {
        const bool swap = std::lexicographical_compare(q.data(), q.data() + 3, p.data(), p.data() + 3);
        const Vec3 &a = swap ? q : p;
        const Vec3 &b = swap ? p : q;
        const Vec3 d = b - a;
        const double len = d.norm();
        if (!(len > 0.0))
            throw std::invalid_argument("occluded: segment endpoints coincide");
        return scene.any_hit(a, d / len, len - kSelfHitEps, exclude);
    }

    inline bool is_inside_building(const Vec3 &point, const Scene &scene)
    {
        if (point.z() < 0.0)
            return false;
        const Vec2 xy(point.x(), point.y());
        const auto &buildings = scene.buildings();
        for (std::size_t i = 0; i < buildings.size(); ++i)
        {
            const auto &b = buildings[i];
            if (point.z() >= b.height)
                continue;
            const Aabb &box = scene.building_box(i);
            if (xy.x() < box.lo.x() || xy.x() > box.hi.x() || xy.y() < box.lo.y() || xy.y() > box.hi.y())
                continue;
            if (poly::strictly_inside(xy, b.footprint))
                return true;
        }
        return false;
    }
}

#endif
