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

#ifndef HETMAP_APPLICATION_HPP
#define HETMAP_APPLICATION_HPP

#include "hetmap/monitor.hpp"
#include "hetmap/operating_point.hpp"

#include <optional>
#include <string>

namespace hetmap {

/// Maturity of an application's learned operating points. Only moves forward.
enum class Stage { initial = 0, refinement = 1, stable = 2 };

const char* to_string(Stage s);

struct Application {
    std::string app_id;
    std::optional<AppDescription> description;
    Stage stage = Stage::initial;
    MeasurementHistory history;
    double priority = 1.0;

    /// Moves to `s` if it is later than the current stage.
    void advance_to(Stage s)
    {
        if (static_cast<int>(s) > static_cast<int>(stage))
            stage = s;
    }
};

inline const char* to_string(Stage s)
{
    switch (s) {
    case Stage::initial:
        return "Initial";
    case Stage::refinement:
        return "Refinement";
    case Stage::stable:
        return "Stable";
    }
    return "Initial";
}

} // namespace hetmap

#endif
