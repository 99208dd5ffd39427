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

#ifndef HETMAP_POLY_MODEL_HPP
#define HETMAP_POLY_MODEL_HPP

#include "hetmap/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace hetmap {

/**
 * \brief All monomials of total degree <= `degree` over `dims` variables.
 *
 * Graded lexicographic order: the constant term first, then the linear
 * terms x0..x{n-1}, then x0², x0·x1, ... and so on.
 */
class MonomialBasis {
public:
    MonomialBasis() = default;
    MonomialBasis(std::size_t dims, int degree) : dims_(dims), degree_(degree)
    {
        if (degree < 0)
            throw std::invalid_argument("negative polynomial degree");
        std::vector<int> cur(dims, 0);
        for (int d = 0; d <= degree; ++d)
            generate(0, d, cur);
    }

    std::size_t dims() const { return dims_; }
    int degree() const { return degree_; }
    std::size_t size() const { return exponents_.size(); }
    const std::vector<std::vector<int>>& exponents() const { return exponents_; }

    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> evaluate(const Eigen::MatrixBase<Derived>& x) const
    {
        using Scalar = typename Derived::Scalar;
        if (static_cast<std::size_t>(x.size()) != dims_)
            throw DimensionError("monomial basis over " + std::to_string(dims_) + " dims evaluated at a " +
                                 std::to_string(x.size()) + "-vector");
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(size()));
        for (std::size_t t = 0; t < exponents_.size(); ++t) {
            Scalar v(1);
            for (std::size_t i = 0; i < dims_; ++i)
                for (int e = 0; e < exponents_[t][i]; ++e)
                    v *= x[static_cast<Eigen::Index>(i)];
            out[static_cast<Eigen::Index>(t)] = v;
        }
        return out;
    }

    /// Number of monomials for (dims, degree): C(dims + degree, degree).
    static std::size_t count(std::size_t dims, int degree)
    {
        std::size_t c = 1;
        for (int k = 1; k <= degree; ++k)
            c = c * (dims + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
        return c;
    }

private:
    // exponent vectors of total degree exactly `remaining`, lexicographically
    // descending in the leading variable
    void generate(std::size_t i, int remaining, std::vector<int>& cur)
    {
        if (dims_ == 0) {
            if (remaining == 0)
                exponents_.push_back(cur);
            return;
        }
        if (i + 1 == dims_) {
            cur[i] = remaining;
            exponents_.push_back(cur);
            cur[i] = 0;
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[i] = e;
            generate(i + 1, remaining - e, cur);
        }
        cur[i] = 0;
    }

    std::size_t dims_ = 0;
    int degree_ = 0;
    std::vector<std::vector<int>> exponents_;
};

/// Least-squares polynomial surrogate for IPS and power over configuration
/// vectors.
template <typename Scalar>
struct BasicPolyModel {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    MonomialBasis basis;
    Vector ips_coefficients;
    Vector power_coefficients;
    std::size_t training_count = 0;

    int degree() const { return basis.degree(); }

    template <typename Derived>
    Scalar predict_ips(const Eigen::MatrixBase<Derived>& x) const
    {
        return basis.evaluate(x.template cast<Scalar>()).dot(ips_coefficients);
    }

    template <typename Derived>
    Scalar predict_power(const Eigen::MatrixBase<Derived>& x) const
    {
        return basis.evaluate(x.template cast<Scalar>()).dot(power_coefficients);
    }
};

/**
 * Fits both outputs on the rows of `inputs`. Rank deficiency is resolved by
 * the minimum-norm solution of a complete orthogonal decomposition.
 * Throws UnderdeterminedError when there are fewer rows than monomials.
 */
template <typename Scalar>
BasicPolyModel<Scalar> fit_polynomial(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& inputs,
                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& ips,
                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& power, int degree)
{
    BasicPolyModel<Scalar> model;
    model.basis = MonomialBasis(static_cast<std::size_t>(inputs.cols()), degree);
    const auto rows = inputs.rows();
    const auto terms = static_cast<Eigen::Index>(model.basis.size());
    if (rows < terms)
        throw UnderdeterminedError("degree-" + std::to_string(degree) + " fit needs " + std::to_string(terms) +
                                   " distinct configurations, got " + std::to_string(rows));
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> design(rows, terms);
    for (Eigen::Index r = 0; r < rows; ++r)
        design.row(r) = model.basis.evaluate(inputs.row(r).transpose()).transpose();
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> cod(design);
    model.ips_coefficients = cod.solve(ips);
    model.power_coefficients = cod.solve(power);
    model.training_count = static_cast<std::size_t>(rows);
    return model;
}

using PolyModel = BasicPolyModel<double>;

} // namespace hetmap

#endif
