// SPDX-License-Identifier: Apache-2.0
//
// maisac: movable-antenna ISAC beamforming and position optimization
// Copyright (C) 2026 The maisac authors
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

#ifndef MAISAC_SCENE_IO_HPP
#define MAISAC_SCENE_IO_HPP

// JSON form of a scene. Angles are given in degrees, everything else in SI units:
//
//   { "n_tx": 8, "n_rx": 8, "wavelength": 1.0, "min_spacing": 0.5,
//     "tx_aperture": 8.0, "rx_aperture": 8.0,
//     "theta_target_deg": 30, "theta_clutter_deg": 60, "theta_user_deg": 45,
//     "target_gain": 1, "clutter_gain": 1, "path_gain": [1, 0],
//     "radar_noise": 0.01, "comm_noise": 0.01, "power_budget": 1, "sensing_floor": 1000 }
//
// Every field is optional and defaults to SceneConfig{}. Unknown fields are rejected.

#include "maisac/scene.hpp"

#include <string>

namespace maisac
{
    // Throws ConfigError naming the field (or line and column for syntax errors)
    SceneConfig parse_scene(const std::string &text, const std::string &origin = "<scene>");
    SceneConfig load_scene(const std::string &path);

    std::string scene_to_json(const SceneConfig &scene, int indent = 2);

    // Reads a whole file; throws ConfigError if it cannot be opened
    std::string read_text_file(const std::string &path);
}

#endif
