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

#ifndef UAVMIMO_RANKANALYSIS_HPP
#define UAVMIMO_RANKANALYSIS_HPP

#include "mimo.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace uavmimo
{
    // Descending, non-negative singular values of a channel
    struct SingularSpectrum
    {
        std::vector<double> sigma;

        std::size_t size() const { return sigma.size(); }
        double operator[](std::size_t i) const { return sigma[i]; }
    };

    inline SingularSpectrum singular_values(const Channel &channel)
    {
        if (!channel.h.allFinite())
            throw std::domain_error("singular_values: channel has non-finite entries");
        SingularSpectrum s;
        const auto n = std::min(channel.h.rows(), channel.h.cols());
        s.sigma.assign(static_cast<std::size_t>(n), 0.0);
        if (n == 0)
            return s;
        // Singular values only; U and V are not needed downstream
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(channel.h);
        const auto &sv = svd.singularValues();
        for (Eigen::Index i = 0; i < n; ++i)
            s.sigma[static_cast<std::size_t>(i)] = sv(i);
        std::sort(s.sigma.begin(), s.sigma.end(), std::greater<>());
        // Values at the round-off floor are exact zeros, so a single-path channel has sigma_2 = 0
        const double floor = s.sigma.front() * static_cast<double>(std::max(channel.h.rows(), channel.h.cols())) *
                             std::numeric_limits<double>::epsilon();
        for (auto &v : s.sigma)
            if (v <= floor)
                v = 0.0;
        return s;
    }

    // ------------------------------------------------------------------------
    // Thresholding

    // sigma_thr = sigma_1 / K
    struct RelativeK
    {
        double k = 10.0;
    };

    // sigma_thr for order s = means[s]
    struct PopulationMean
    {
        std::vector<double> means;
    };

    using RankCriterion = std::variant<RelativeK, PopulationMean>;

    struct Thresholded
    {
        std::vector<double> sigma; // survivors kept, the rest zeroed
        int rank = 0;              // number of survivors
    };

    // sigma_s survives iff sigma_s >= threshold_s; survival is evaluated per order
    inline Thresholded apply_threshold(const SingularSpectrum &spectrum, const RankCriterion &criterion)
    {
        Thresholded out;
        out.sigma = spectrum.sigma;
        if (spectrum.sigma.empty() || spectrum.sigma.front() <= 0.0)
        {
            std::fill(out.sigma.begin(), out.sigma.end(), 0.0);
            return out;
        }
        for (std::size_t s = 0; s < out.sigma.size(); ++s)
        {
            double thr = 0.0;
            if (const auto *rel = std::get_if<RelativeK>(&criterion))
            {
                if (!(rel->k > 1.0))
                    throw std::invalid_argument("RelativeK: K must be > 1");
                thr = spectrum.sigma.front() / rel->k;
            }
            else
            {
                const auto &means = std::get<PopulationMean>(criterion).means;
                if (means.size() < out.sigma.size())
                    throw std::invalid_argument("PopulationMean: fewer means than singular values");
                thr = means[s];
            }
            // a zero value never counts as a stream, even against a zero threshold
            if (out.sigma[s] >= thr && out.sigma[s] > 0.0)
                ++out.rank;
            else
                out.sigma[s] = 0.0;
        }
        return out;
    }

    // 20 log10(sigma_1 / sigma_2); nullopt when sigma_2 is zero or absent
    inline std::optional<double> condition_number_db(const SingularSpectrum &spectrum)
    {
        if (spectrum.sigma.size() < 2 || !(spectrum.sigma[1] > 0.0))
            return std::nullopt;
        return 20.0 * std::log10(spectrum.sigma[0] / spectrum.sigma[1]);
    }

    inline std::optional<double> condition_number_db(const std::vector<double> &sigma)
    {
        return condition_number_db(SingularSpectrum{sigma});
    }

    // ------------------------------------------------------------------------
    // Per-site record and population statistics

    struct SiteResult
    {
        Vec3 position = Vec3::Zero();
        SiteFlag flag = SiteFlag::no_coverage;
        std::optional<double> rssi_dbm;
        std::optional<SingularSpectrum> spectrum;
        std::vector<int> ranks;                      // one per configured criterion; empty unless covered
        std::optional<double> cn_db;                 // from the raw spectrum
        std::vector<std::optional<double>> cn_db_by_criterion; // from each thresholded spectrum
        std::size_t n_paths = 0;

        bool covered() const { return flag == SiteFlag::covered; }
    };

    // Mean s-th singular value over a layer. By default only covered sites count;
    // with include_uncovered, Z/B sites enter as all-zero spectra.
    inline std::vector<double> population_mean_thresholds(std::span<const SiteResult> results, bool include_uncovered = false)
    {
        std::vector<double> sum;
        std::size_t covered = 0, population = 0;
        for (const auto &r : results)
        {
            if (!r.covered() || !r.spectrum)
            {
                if (include_uncovered)
                    ++population;
                continue;
            }
            ++covered;
            ++population;
            if (sum.size() < r.spectrum->size())
                sum.resize(r.spectrum->size(), 0.0);
            for (std::size_t s = 0; s < r.spectrum->size(); ++s)
                sum[s] += r.spectrum->sigma[s];
        }
        if (covered == 0)
            throw std::domain_error("population mean threshold: no covered sites in this layer");
        for (auto &v : sum)
            v /= static_cast<double>(population);
        return sum;
    }

    // Right-continuous empirical CDF over distinct breakpoints
    struct Ecdf
    {
        std::vector<double> x;
        std::vector<double> p;

        bool empty() const { return x.empty(); }

        double operator()(double v) const
        {
            const auto it = std::upper_bound(x.begin(), x.end(), v);
            if (it == x.begin())
                return 0.0;
            return p[static_cast<std::size_t>(it - x.begin()) - 1];
        }
    };

    inline Ecdf ecdf(std::vector<double> values)
    {
        Ecdf f;
        if (values.empty())
            return f;
        for (double v : values)
            if (!std::isfinite(v))
                throw std::invalid_argument("ecdf: non-finite value");
        std::sort(values.begin(), values.end());
        const double n = static_cast<double>(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            if (i + 1 < values.size() && values[i + 1] == values[i])
                continue;
            f.x.push_back(values[i]);
            f.p.push_back(static_cast<double>(i + 1) / n);
        }
        f.p.back() = 1.0;
        return f;
    }

    // Counts behind P_Z, P_B and P_r; probabilities are count ratios
    struct CoverageSummary
    {
        std::size_t total = 0;
        std::size_t z = 0;
        std::size_t b = 0;
        std::vector<std::vector<std::size_t>> rank_counts; // [criterion][rank 0..max]

        double p_z() const { return ratio(z); }
        double p_b() const { return ratio(b); }
        double p_rank(std::size_t criterion, std::size_t rank) const
        {
            const auto &counts = rank_counts.at(criterion);
            return rank < counts.size() ? ratio(counts[rank]) : 0.0;
        }
        double p_r1(std::size_t criterion) const { return p_rank(criterion, 1); }

        // z + b + sum of rank counts == total, per criterion
        bool conserved() const
        {
            for (const auto &counts : rank_counts)
            {
                std::size_t s = z + b;
                for (auto c : counts)
                    s += c;
                if (s != total)
                    return false;
            }
            return true;
        }

    private:
        double ratio(std::size_t n) const { return total ? static_cast<double>(n) / static_cast<double>(total) : 0.0; }
    };

    inline CoverageSummary coverage_probabilities(std::span<const SiteResult> results, std::size_t n_criteria,
                                                  std::size_t max_rank = 4)
    {
        if (results.empty())
            throw std::invalid_argument("coverage_probabilities: empty result list");
        CoverageSummary s;
        s.total = results.size();
        s.rank_counts.assign(n_criteria, std::vector<std::size_t>(max_rank + 1, 0));
        for (const auto &r : results)
        {
            if (r.flag == SiteFlag::no_coverage)
                ++s.z;
            else if (r.flag == SiteFlag::inside_building)
                ++s.b;
            else
                for (std::size_t c = 0; c < n_criteria; ++c)
                {
                    const auto rank = static_cast<std::size_t>(r.ranks.at(c));
                    if (rank >= s.rank_counts[c].size())
                        s.rank_counts[c].resize(rank + 1, 0);
                    ++s.rank_counts[c][rank];
                }
        }
        return s;
    }
}

#endif
