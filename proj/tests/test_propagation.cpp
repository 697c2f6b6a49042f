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

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace uavmimo;
using Catch::Approx;

static const double lambda = test::kLambda34;

static Scene open_ground(const Material &ground, double half = 3000.0)
{
    return Scene({}, test::concrete(), ground, Bounds2{Vec2(-half, -half), Vec2(half, half)});
}

static double wrap(double phase) { return std::remainder(phase, 2.0 * std::numbers::pi); }

TEST_CASE("Propagation - enumerate_paths examples")
{
    SECTION("Free space gives exactly the direct path")
    {
        const Scene s = Scene::empty();
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-500, 500);
        for (int i = 0; i < 50; ++i)
        {
            const Vec3 tx(u(rng), u(rng), u(rng)), rx(u(rng), u(rng), u(rng));
            const PathSet ps = enumerate_paths(tx, rx, s, 2);
            REQUIRE(ps.paths.size() == 1);
            CHECK(ps.paths[0].order() == 0);
            CHECK(ps.paths[0].length == Approx((tx - rx).norm()).epsilon(1e-15));
            CHECK(ps.flag == SiteFlag::covered);
        }
    }

    SECTION("Two-ray geometry over bare ground")
    {
        const Scene s = open_ground(test::pec());
        const PathSet ps = enumerate_paths(Vec3(0, 0, 10), Vec3(100, 0, 30), s, 2);
        REQUIRE(ps.paths.size() == 2);
        CHECK(ps.paths[0].order() == 0);
        CHECK(ps.paths[0].length == Approx(std::sqrt(100.0 * 100 + 20 * 20)).epsilon(1e-14));
        CHECK(ps.paths[0].length == Approx(101.980).margin(5e-4));
        CHECK(ps.paths[1].order() == 1);
        CHECK(ps.paths[1].facets == std::vector<FacetId>{0});
        CHECK(ps.paths[1].length == Approx(107.703).margin(5e-4));
        CHECK((ps.paths[1].points[1] - Vec3(25, 0, 0)).norm() < 1e-9);
        CHECK(ps.paths[1].dep_dir.isApprox(Vec3(25, 0, -10).normalized()));
        CHECK(ps.paths[1].arr_dir.isApprox(Vec3(75, 0, 30).normalized()));
    }

    SECTION("Receiver inside a building")
    {
        const Scene s({test::box_building(50, 0, 20, 20, 15)}, test::concrete(), test::pec(),
                      Bounds2{Vec2(-100, -100), Vec2(100, 100)});
        const PathSet ps = enumerate_paths(Vec3(0, 0, 10), Vec3(50, 0, 3), s, 2);
        CHECK(ps.flag == SiteFlag::inside_building);
        CHECK(ps.paths.empty());
    }

    SECTION("Fully blocked receiver is flagged Z")
    {
        // Direct path blocked, reflections disabled
        const Scene s({test::box_building(100, 0, 10, 10, 60)}, test::concrete(), test::pec(),
                      Bounds2{Vec2(-200, -200), Vec2(200, 200)});
        const PathSet ps = enumerate_paths(Vec3(0, 0, 10), Vec3(120, 0, 5), s, 0);
        CHECK(ps.flag == SiteFlag::no_coverage);
        CHECK(ps.paths.empty());
    }

    SECTION("Invalid arguments")
    {
        const Scene s = Scene::empty();
        CHECK_THROWS_AS(enumerate_paths(Vec3(0, 0, 1), Vec3(0, 0, 1), s, 1), std::invalid_argument);
        CHECK_THROWS_AS(enumerate_paths(Vec3(0, 0, 1), Vec3(0, 0, 2), s, 3), std::invalid_argument);
    }
}

TEST_CASE("Propagation - fresnel_gamma")
{
    const double f = 3.4e9;
    for (double c : {1.0, 0.5, 0.01})
        for (auto pol : {Polarization::perpendicular, Polarization::parallel})
            CHECK(fresnel_gamma(test::pec(), c, pol, f) == cdouble(-1.0, 0.0));

    const Material lossless{"concrete", 5.24, 0.0, false};
    const double expected = (1.0 - std::sqrt(5.24)) / (1.0 + std::sqrt(5.24));
    CHECK(expected == Approx(-0.3920).margin(1e-4));
    for (auto pol : {Polarization::perpendicular, Polarization::parallel})
    {
        const cdouble g = fresnel_gamma(lossless, 1.0, pol, f);
        CHECK(g.real() == Approx(expected).epsilon(1e-12));
        CHECK(g.imag() == Approx(0.0).margin(1e-15));
    }

    // Grazing limit
    const cdouble graze = fresnel_gamma(test::concrete(), 1e-9, Polarization::perpendicular, f);
    CHECK(std::abs(graze - cdouble(-1.0, 0.0)) < 1e-6);

    // Brewster angle of a lossless dielectric: parallel component vanishes
    const double cos_b = std::cos(std::atan(std::sqrt(5.24)));
    CHECK(std::abs(fresnel_gamma(lossless, cos_b, Polarization::parallel, f)) < 1e-12);

    CHECK_THROWS_AS(fresnel_gamma(lossless, 0.0, Polarization::parallel, f), std::domain_error);
    CHECK_THROWS_AS(fresnel_gamma(lossless, -0.3, Polarization::perpendicular, f), std::domain_error);

    // |Gamma| <= 1 over random passive materials
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> eps(1.0, 80.0), sig(0.0, 10.0), ct(1e-6, 1.0), fr(1e8, 1e11);
    for (int i = 0; i < 5000; ++i)
    {
        const Material m{"rnd", eps(rng), sig(rng), false};
        const double c = ct(rng), fq = fr(rng);
        CHECK(std::abs(fresnel_gamma(m, c, Polarization::perpendicular, fq)) <= 1.0 + 1e-12);
        CHECK(std::abs(fresnel_gamma(m, c, Polarization::parallel, fq)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("Propagation - path_amplitude")
{
    SECTION("Direct path at 100 m")
    {
        const PathSet ps = enumerate_paths(Vec3(0, 0, 10), Vec3(100, 0, 10), Scene::empty(), 2, lambda);
        REQUIRE(ps.paths.size() == 1);
        const cdouble a = ps.paths[0].amplitude;
        CHECK(std::abs(a) == Approx(lambda / (4 * std::numbers::pi * 100)).epsilon(1e-12));
        CHECK(std::abs(a) == Approx(7.016e-5).epsilon(2e-4));
        CHECK(std::abs(wrap(std::arg(a) - (-2 * std::numbers::pi * 100 / lambda))) < 1e-9);
    }

    SECTION("One perfect bounce, unfolded length 100 m: extra pi")
    {
        const double half = std::sqrt(50.0 * 50.0 - 10.0 * 10.0);
        const PathSet ps = enumerate_paths(Vec3(0, 0, 10), Vec3(2 * half, 0, 10), open_ground(test::pec()), 2, lambda);
        REQUIRE(ps.paths.size() == 2);
        const PropPath &b = ps.paths[1];
        CHECK(b.length == Approx(100.0).epsilon(1e-14));
        const cdouble los100 = std::polar(lambda / (4 * std::numbers::pi * 100), -2 * std::numbers::pi * std::fmod(100 / lambda, 1.0));
        CHECK(std::abs(b.amplitude + los100) < 1e-12 * std::abs(los100));
    }

    SECTION("Perfect reflectors everywhere: amplitude is (-1)^order times the free-space phasor")
    {
        std::mt19937_64 rng(5);
        const Scene s = test::random_scene(rng, 15, test::pec(), test::pec(), 120.0);
        std::array<int, 3> seen{};
        for (int i = 0; i < 40; ++i)
        {
            const Vec3 tx = test::random_outdoor_point(rng, s, 150, 1, 50);
            const Vec3 rx = test::random_outdoor_point(rng, s, 150, 1, 120);
            const PathSet ps = enumerate_paths(tx, rx, s, 2, lambda);
            for (const auto &p : ps.paths)
            {
                ++seen[std::size_t(p.order())];
                const cdouble free = std::polar(lambda / (4 * std::numbers::pi * p.length),
                                                -2 * std::numbers::pi * std::fmod(p.length / lambda, 1.0));
                const double sign = p.order() % 2 ? -1.0 : 1.0;
                CHECK(std::abs(p.amplitude - sign * free) < 1e-9 * std::abs(free));
            }
        }
        CHECK(seen[0] > 0);
        CHECK(seen[1] > 0);
        CHECK(seen[2] > 0);
    }
}

TEST_CASE("Propagation - rssi_dbm")
{
    const PathSet ps = enumerate_paths(Vec3(0, 0, 10), Vec3(100, 0, 10), Scene::empty(), 0, lambda);
    const auto r = rssi_dbm(ps, 10.0);
    REQUIRE(r);
    const double fspl = 20 * std::log10(4 * std::numbers::pi * 100 * 3.4e9 / kSpeedOfLight);
    CHECK(*r == Approx(40.0 - fspl).margin(1e-9));
    CHECK(std::abs(*r - (-43.08)) < 0.01);
    CHECK(*r > -55.0);
    CHECK(*r < -40.0);

    CHECK_FALSE(rssi_dbm(PathSet{}, 10.0));
    CHECK_THROWS_AS(rssi_dbm(ps, 0.0), std::invalid_argument);

    PathSet pair;
    pair.flag = SiteFlag::covered;
    pair.paths.resize(2);
    pair.paths[0].amplitude = cdouble(3e-5, 4e-5);
    pair.paths[1].amplitude = -pair.paths[0].amplitude;
    const auto cancelled = rssi_dbm(pair, 10.0, RssiMode::coherent);
    REQUIRE(cancelled);
    CHECK(std::isinf(*cancelled));
    CHECK(*cancelled < 0);
    const auto incoherent = rssi_dbm(pair, 10.0, RssiMode::incoherent);
    CHECK(*incoherent == Approx(watts_to_dbm(10.0 * 2 * std::norm(pair.paths[0].amplitude))));
}

TEST_CASE("Propagation - Two-ray curve over a perfect ground")
{
    const Scene s = open_ground(test::pec());
    const double h_tx = 10, h_rx = 30;
    const PathTracer tracer(s, Vec3(0, 0, h_tx), 2, lambda);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i)
    {
        const double d = 50.0 * std::pow(2000.0 / 50.0, i / 199.0);
        const PathSet ps = tracer.trace(Vec3(d, 0, h_rx));
        REQUIRE(ps.paths.size() == 2);
        const double got = *rssi_dbm(ps, 10.0);
        worst = std::max(worst, std::abs(got - test::two_ray_dbm(10.0, 3.4e9, h_tx, h_rx, d)));
    }
    CHECK(worst < 0.01);
}

TEST_CASE("Propagation - Properties on random scenes")
{
    std::mt19937_64 rng(424242);
    const Scene scene = test::random_scene(rng, 20, test::concrete(), material_by_name("wet_ground", 3.4e9), 150.0);

    std::vector<std::pair<Vec3, Vec3>> pairs;
    for (int i = 0; i < 120; ++i)
        pairs.emplace_back(test::random_outdoor_point(rng, scene, 180, 1, 40),
                           test::random_outdoor_point(rng, scene, 180, 1, 120));

    SECTION("Pruned tracer agrees with unpruned enumeration")
    {
        std::size_t total = 0, second = 0;
        for (const auto &[tx, rx] : pairs)
        {
            const PathSet ps = enumerate_paths(tx, rx, scene, 2);
            const auto ref = test::brute_force_paths(tx, rx, scene, 2);
            REQUIRE(ps.paths.size() == ref.size());
            for (std::size_t k = 0; k < ref.size(); ++k)
            {
                CHECK(ps.paths[k].facets == ref[k].facets);
                CHECK(std::abs(ps.paths[k].length - ref[k].length) < 1e-9);
                second += ref[k].facets.size() == 2;
            }
            total += ref.size();
        }
        CHECK(total > pairs.size());
        CHECK(second > 0);
    }

    SECTION("Path invariants")
    {
        for (const auto &[tx, rx] : pairs)
        {
            const PathSet ps = enumerate_paths(tx, rx, scene, 2, lambda);
            CHECK((ps.flag == SiteFlag::covered) == !ps.paths.empty());
            for (std::size_t k = 0; k < ps.paths.size(); ++k)
            {
                const PropPath &p = ps.paths[k];
                CHECK(p.order() == static_cast<int>(p.points.size()) - 2);
                CHECK(p.facets.size() == static_cast<std::size_t>(p.order()));
                double sum = 0;
                for (std::size_t j = 0; j + 1 < p.points.size(); ++j)
                    sum += (p.points[j + 1] - p.points[j]).norm();
                CHECK(std::abs(sum - p.length) < 1e-9);
                CHECK(std::abs(p.dep_dir.norm() - 1) < 1e-12);
                CHECK(std::abs(p.arr_dir.norm() - 1) < 1e-12);
                CHECK(std::abs(p.amplitude) <= lambda / (4 * std::numbers::pi * p.length) * (1 + 1e-12));
                if (k > 0)
                {
                    const PropPath &q = ps.paths[k - 1];
                    const bool ordered = q.order() < p.order() || (q.order() == p.order() && q.facets < p.facets);
                    CHECK(ordered);
                }
                if (p.order() == 1)
                {
                    const Facet &f = scene.facet(p.facets[0]);
                    const Vec3 in = (p.points[1] - p.points[0]).normalized();
                    const Vec3 out = (p.points[2] - p.points[1]).normalized();
                    const double a_in = std::acos(std::clamp(std::abs(in.dot(f.normal())), 0.0, 1.0));
                    const double a_out = std::acos(std::clamp(std::abs(out.dot(f.normal())), 0.0, 1.0));
                    CHECK(std::abs(a_in - a_out) < 1e-9);
                    CHECK(std::abs(p.length - (f.mirror(tx) - rx).norm()) < 1e-9);
                }
            }
        }
    }

    SECTION("Reciprocity of geometry")
    {
        for (const auto &[tx, rx] : pairs)
        {
            const PathSet fwd = enumerate_paths(tx, rx, scene, 2);
            const PathSet bwd = enumerate_paths(rx, tx, scene, 2);
            REQUIRE(fwd.paths.size() == bwd.paths.size());
            for (const auto &p : fwd.paths)
            {
                std::vector<FacetId> rev(p.facets.rbegin(), p.facets.rend());
                const auto it = std::find_if(bwd.paths.begin(), bwd.paths.end(),
                                             [&](const PropPath &q) { return q.facets == rev; });
                REQUIRE(it != bwd.paths.end());
                CHECK(std::abs(it->length - p.length) < 1e-9);
                for (std::size_t j = 0; j < p.points.size(); ++j)
                    CHECK((it->points[p.points.size() - 1 - j] - p.points[j]).norm() < 1e-7);
            }
        }
    }

    SECTION("Adding a building never adds a direct path")
    {
        const auto all = test::random_buildings(rng, 12, 150.0);
        const Bounds2 b{Vec2(-250, -250), Vec2(250, 250)};
        std::vector<Building> fewer;
        for (std::size_t k = 0; k < all.size(); ++k)
        {
            const Scene before(fewer, test::concrete(), test::concrete(), b);
            fewer.push_back(all[k]);
            const Scene after(fewer, test::concrete(), test::concrete(), b);
            for (int i = 0; i < 40; ++i)
            {
                const Vec3 tx = test::random_outdoor_point(rng, after, 180, 1, 40);
                const Vec3 rx = test::random_outdoor_point(rng, after, 180, 1, 120);
                const bool los_after = !enumerate_paths(tx, rx, after, 0).paths.empty();
                const bool los_before = !enumerate_paths(tx, rx, before, 0).paths.empty();
                CHECK((!los_after || los_before));
            }
        }
    }

    SECTION("Open ground gives exactly the direct path and the ground bounce")
    {
        const Scene open = open_ground(test::concrete(), 400);
        for (const auto &[tx, rx] : pairs)
        {
            const PathSet ps = enumerate_paths(tx, rx, open, 2);
            REQUIRE(ps.paths.size() == 2);
            CHECK(ps.paths[0].order() == 0);
            CHECK(ps.paths[1].facets == std::vector<FacetId>{0});
        }
    }
}
