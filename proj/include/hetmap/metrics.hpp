// Copyright 2026 The hetmap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HETMAP_METRICS_HPP
#define HETMAP_METRICS_HPP

#include "hetmap/error.hpp"
#include "hetmap/operating_point.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>

namespace hetmap {

/// Mean absolute percentage error, in percent.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar mape(const Eigen::MatrixBase<DerivedA>& predicted, const Eigen::MatrixBase<DerivedB>& actual)
{
    using Scalar = typename DerivedA::Scalar;
    if (predicted.size() != actual.size())
        throw DimensionError("MAPE over vectors of different length");
    if (actual.size() == 0)
        throw std::invalid_argument("MAPE over empty vectors");
    if ((actual.array() == Scalar(0)).any())
        throw std::domain_error("MAPE with a zero actual value");
    return ((predicted - actual).array().abs() / actual.array().abs()).mean() * Scalar(100);
}

inline double mape(std::span<const double> predicted, std::span<const double> actual)
{
    using Map = Eigen::Map<const Eigen::VectorXd>;
    return mape(Map(predicted.data(), static_cast<Eigen::Index>(predicted.size())),
                Map(actual.data(), static_cast<Eigen::Index>(actual.size())));
}

/**
 * Inverted generational distance in (utility, power) space.
 *
 * Both coordinates are divided by the reference front's range before
 * distances are taken; a coordinate with zero range is left unscaled.
 * Rows of the matrices are points, columns the objectives.
 */
template <typename DerivedR, typename DerivedG>
typename DerivedR::Scalar igd(const Eigen::MatrixBase<DerivedR>& reference, const Eigen::MatrixBase<DerivedG>& generated)
{
    using Scalar = typename DerivedR::Scalar;
    if (reference.rows() == 0 || generated.rows() == 0)
        throw std::invalid_argument("IGD needs non-empty fronts");
    if (reference.cols() != generated.cols())
        throw DimensionError("IGD over fronts with different objective counts");
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> range = reference.colwise().maxCoeff() - reference.colwise().minCoeff();
    for (Eigen::Index c = 0; c < range.size(); ++c)
        if (!(range[c] > Scalar(0)))
            range[c] = Scalar(1);
    Scalar total(0);
    for (Eigen::Index r = 0; r < reference.rows(); ++r) {
        Scalar best = std::numeric_limits<Scalar>::infinity();
        for (Eigen::Index g = 0; g < generated.rows(); ++g) {
            Scalar d = ((reference.row(r) - generated.row(g)).array() / range.array()).matrix().norm();
            best = std::min(best, d);
        }
        total += best;
    }
    return total / Scalar(reference.rows());
}

/// Objective matrix (utility, power) of a list of operating points.
inline Eigen::MatrixX2d objective_matrix(std::span<const OperatingPoint> front)
{
    Eigen::MatrixX2d m(static_cast<Eigen::Index>(front.size()), 2);
    for (std::size_t i = 0; i < front.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) << front[i].utility, front[i].power;
    return m;
}

inline double igd(std::span<const OperatingPoint> reference, std::span<const OperatingPoint> generated)
{
    return igd(objective_matrix(reference), objective_matrix(generated));
}

/// Fraction of the reference front's configurations also on `generated`.
inline double common_ratio(std::span<const OperatingPoint> reference, std::span<const OperatingPoint> generated)
{
    if (reference.empty())
        throw std::invalid_argument("common ratio with an empty reference front");
    std::set<Configuration> gen;
    for (const auto& p : generated)
        gen.insert(p.config);
    std::set<Configuration> ref;
    for (const auto& p : reference)
        ref.insert(p.config);
    std::size_t common = 0;
    for (const auto& c : ref)
        common += gen.count(c);
    return static_cast<double>(common) / static_cast<double>(ref.size());
}

struct FrontComparison {
    double igd = 0.0;
    double common_ratio = 0.0;
    double mape_ips = 0.0;
    double mape_power = 0.0;
};

} // namespace hetmap

#endif
