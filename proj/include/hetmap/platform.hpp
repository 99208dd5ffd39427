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

#ifndef HETMAP_PLATFORM_HPP
#define HETMAP_PLATFORM_HPP

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hetmap {

/// Physical cores per core type (the footprint θ of an operating point).
using CoreVector = Eigen::VectorXi;

struct CoreType {
    std::string id;
    int count = 1;
    int hw_threads = 1;
    double power_coefficient = 1.0;
};

/**
 * \brief Heterogeneous processor description.
 *
 * Every core type contributes `hw_threads` configuration dimensions: bucket
 * `(type, j)` counts the cores of that type on which exactly `j` hardware
 * threads are used. Buckets are laid out in core-type declaration order,
 * then by ascending `j`.
 */
class Platform {
public:
    Platform() = default;
    /// Validates the invariants; throws ValidationError.
    Platform(std::string name, std::vector<CoreType> core_types);

    const std::string& name() const { return name_; }
    const std::vector<CoreType>& core_types() const { return core_types_; }
    const CoreType& core_type(std::size_t k) const { return core_types_.at(k); }

    std::size_t num_types() const { return core_types_.size(); }
    std::size_t dimensions() const { return bucket_type_.size(); }

    /// Core type index owning configuration dimension `d`.
    std::size_t bucket_type(std::size_t d) const { return bucket_type_.at(d); }
    /// Hardware threads per core represented by dimension `d` (1-based).
    int bucket_threads(std::size_t d) const { return bucket_threads_.at(d); }
    /// First configuration dimension of core type `k`.
    std::size_t first_bucket(std::size_t k) const { return first_bucket_.at(k); }

    CoreVector capacity() const;
    int total_cores() const;
    std::optional<std::size_t> type_index(const std::string& id) const;

private:
    std::string name_;
    std::vector<CoreType> core_types_;
    std::vector<std::size_t> bucket_type_;
    std::vector<int> bucket_threads_;
    std::vector<std::size_t> first_bucket_;
};

/// Per-bucket core counts in platform dimension order.
struct Configuration {
    std::vector<int> dims;

    Configuration() = default;
    explicit Configuration(std::vector<int> d) : dims(std::move(d)) {}
    Configuration(std::initializer_list<int> d) : dims(d) {}

    std::size_t size() const { return dims.size(); }
    int operator[](std::size_t i) const { return dims[i]; }
    bool is_zero() const;
    Eigen::VectorXd as_vector() const;
    std::string to_string() const;

    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

/// Throws ValidationError when `cfg` has the wrong length, negative entries
/// or exceeds a core type's count.
void validate_configuration(const Configuration& cfg, const Platform& p);

/// Physical cores per type; a core counts once regardless of threads used.
CoreVector footprint(const Configuration& cfg, const Platform& p);

/// All non-zero configurations within the per-type core counts, in
/// lexicographic order. With `cap`, a deterministic subsample of exactly
/// `min(cap, total)` configurations spread evenly over total core count.
std::vector<Configuration> enumerate_configurations(const Platform& p,
                                                    std::optional<std::size_t> cap = std::nullopt);

/// Configuration that uses every hardware thread of every core.
Configuration full_configuration(const Platform& p);

Platform platform_from_json_text(const std::string& text);
std::string platform_to_json_text(const Platform& p);
Platform load_platform(const std::filesystem::path& path);

} // namespace hetmap

#endif
