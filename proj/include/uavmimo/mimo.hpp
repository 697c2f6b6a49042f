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

#ifndef UAVMIMO_MIMO_HPP
#define UAVMIMO_MIMO_HPP

#include "propagation.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>

namespace uavmimo
{
    // Uniform linear array of isotropic elements
    struct ArrayConfig
    {
        int n_elements = 4;
        double spacing_wl = 0.5;         // element spacing in wavelengths
        Vec3 axis = Vec3::UnitX();       // array orientation, unit length
        Vec3 reference = Vec3::Zero();   // position of element 0

        void validate() const
        {
            if (n_elements < 1)
                throw std::invalid_argument("array: n_elements must be >= 1");
            if (!(spacing_wl > 0.0))
                throw std::invalid_argument("array: spacing must be > 0");
            if (std::abs(axis.norm() - 1.0) > 1e-9)
                throw std::invalid_argument("array: axis must be a unit vector");
        }

        Vec3 element_position(int k, double wavelength) const
        {
            return reference + static_cast<double>(k) * spacing_wl * wavelength * axis;
        }
    };

    // Narrowband N_r x N_t channel of field ratios; no noise term
    struct Channel
    {
        Eigen::MatrixXcd h;

        Eigen::Index n_rx() const { return h.rows(); }
        Eigen::Index n_tx() const { return h.cols(); }
    };

    // Plane-wave response: element k gets exp(-j 2 pi spacing k (axis . direction))
    inline Eigen::VectorXcd steering_vector(const ArrayConfig &array, const Vec3 &direction, double /*wavelength*/)
    {
        Eigen::VectorXcd a(array.n_elements);
        const double proj = array.axis.dot(direction);
        for (int k = 0; k < array.n_elements; ++k)
            a(k) = std::polar(1.0, -2.0 * std::numbers::pi * array.spacing_wl * static_cast<double>(k) * proj);
        return a;
    }

    // H = sum_p alpha_p a_rx(arr_dir_p) a_tx(dep_dir_p)^H, summed in path-set order
    inline Channel synthesize_channel(const PathSet &paths, const ArrayConfig &tx, const ArrayConfig &rx, double wavelength)
    {
        tx.validate();
        rx.validate();
        Channel c{Eigen::MatrixXcd::Zero(rx.n_elements, tx.n_elements)};
        for (const auto &p : paths.paths)
        {
            const Eigen::VectorXcd a_r = steering_vector(rx, p.arr_dir, wavelength);
            const Eigen::VectorXcd a_t = steering_vector(tx, p.dep_dir, wavelength);
            c.h.noalias() += p.amplitude * (a_r * a_t.adjoint());
        }
        return c;
    }
}

#endif
