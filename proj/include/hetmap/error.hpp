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

#ifndef HETMAP_ERROR_HPP
#define HETMAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hetmap {

/// Malformed input file (JSON syntax or schema).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input violating a model invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vectors of incompatible dimensionality were combined.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Least-squares system with fewer distinct rows than unknowns.
class UnderdeterminedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact solver refused an instance above its enumeration bound.
class InstanceTooLargeError : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace hetmap

#endif
