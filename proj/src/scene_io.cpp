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

#include "maisac/scene_io.hpp"

#include "json_fields.hpp"

#include <fstream>
#include <sstream>

namespace maisac
{
    using nlohmann::json;

    std::string read_text_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError(path + ": cannot open file");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    SceneConfig parse_scene(const std::string &text, const std::string &origin)
    {
        const json j = detail::parse_json(text, origin);
        detail::Fields f(j, origin, "");
        SceneConfig s = detail::scene_from_fields(f);
        f.finish();
        detail::validate_scene(s, origin);
        return s;
    }

    SceneConfig load_scene(const std::string &path) { return parse_scene(read_text_file(path), path); }

    std::string scene_to_json(const SceneConfig &s, int indent)
    {
        return detail::scene_json(s).dump(indent);
    }
}
