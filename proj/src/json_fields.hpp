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

#ifndef MAISAC_JSON_FIELDS_HPP
#define MAISAC_JSON_FIELDS_HPP

// Field-by-field JSON reading with error messages that name the offending key.

#include "json.hpp"
#include "maisac/errors.hpp"
#include "maisac/scene.hpp"

#include <cmath>
#include <set>
#include <string>

namespace maisac::detail
{
    inline nlohmann::json parse_json(const std::string &text, const std::string &origin)
    {
        try
        {
            return nlohmann::json::parse(text);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            // byte offset to line / column
            size_t line = 1, col = 1;
            for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
            {
                if (text[i] == '\n')
                {
                    ++line;
                    col = 1;
                }
                else
                    ++col;
            }
            throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": invalid JSON (" + e.what() + ")");
        }
    }

    class Fields
    {
    public:
        Fields(const nlohmann::json &j, std::string origin, std::string prefix)
            : j_(j), origin_(std::move(origin)), prefix_(std::move(prefix))
        {
            if (!j_.is_object())
                fail("", "expected a JSON object");
        }

        [[noreturn]] void fail(const std::string &key, const std::string &msg) const
        {
            const std::string name = prefix_ + key;
            throw ConfigError(origin_ + ": " + (name.empty() ? std::string("top level") : "field '" + name + "'") +
                              ": " + msg);
        }

        bool has(const std::string &key)
        {
            seen_.insert(key);
            return j_.contains(key);
        }

        const nlohmann::json &raw(const std::string &key)
        {
            seen_.insert(key);
            return j_.at(key);
        }

        double number(const std::string &key, double fallback)
        {
            if (!has(key))
                return fallback;
            const nlohmann::json &v = j_.at(key);
            if (!v.is_number())
                fail(key, "expected a number");
            const double d = v.get<double>();
            if (!std::isfinite(d))
                fail(key, "must be finite");
            return d;
        }

        int integer(const std::string &key, int fallback)
        {
            if (!has(key))
                return fallback;
            const nlohmann::json &v = j_.at(key);
            if (!v.is_number_integer())
                fail(key, "expected an integer");
            return v.get<int>();
        }

        std::string text(const std::string &key, const std::string &fallback)
        {
            if (!has(key))
                return fallback;
            const nlohmann::json &v = j_.at(key);
            if (!v.is_string())
                fail(key, "expected a string");
            return v.get<std::string>();
        }

        std::complex<double> complex(const std::string &key, std::complex<double> fallback)
        {
            if (!has(key))
                return fallback;
            const nlohmann::json &v = j_.at(key);
            if (v.is_number())
                return {v.get<double>(), 0.0};
            if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
                return {v[0].get<double>(), v[1].get<double>()};
            fail(key, "expected a number or a [re, im] pair");
        }

        // Rejects keys that were never asked for
        void finish() const
        {
            for (auto it = j_.begin(); it != j_.end(); ++it)
                if (!seen_.count(it.key()))
                    fail(it.key(), "unknown field");
        }

        const std::string &origin() const { return origin_; }
        const std::string &prefix() const { return prefix_; }

    private:
        const nlohmann::json &j_;
        std::string origin_;
        std::string prefix_;
        std::set<std::string> seen_;
    };

    inline SceneConfig scene_from_fields(Fields &f)
    {
        SceneConfig s;
        s.wavelength = f.number("wavelength", s.wavelength);
        s.n_tx = f.integer("n_tx", s.n_tx);
        s.n_rx = f.integer("n_rx", s.n_rx);
        s.theta_target = deg2rad(f.number("theta_target_deg", rad2deg(s.theta_target)));
        s.theta_clutter = deg2rad(f.number("theta_clutter_deg", rad2deg(s.theta_clutter)));
        s.theta_user = deg2rad(f.number("theta_user_deg", rad2deg(s.theta_user)));
        s.target_gain = f.number("target_gain", s.target_gain);
        s.clutter_gain = f.number("clutter_gain", s.clutter_gain);
        s.path_gain = f.complex("path_gain", s.path_gain);
        s.radar_noise = f.number("radar_noise", s.radar_noise);
        s.comm_noise = f.number("comm_noise", s.comm_noise);
        s.power_budget = f.number("power_budget", s.power_budget);
        s.sensing_floor = f.number("sensing_floor", s.sensing_floor);
        s.min_spacing = f.number("min_spacing", s.min_spacing);
        s.tx_aperture = f.number("tx_aperture", s.tx_aperture);
        s.rx_aperture = f.number("rx_aperture", s.rx_aperture);
        return s;
    }

    inline void validate_scene(const SceneConfig &s, const std::string &origin)
    {
        try
        {
            s.validate();
        }
        catch (const InvalidParameter &e)
        {
            throw ConfigError(origin + ": " + e.what());
        }
    }

    inline nlohmann::json scene_json(const SceneConfig &s)
    {
        nlohmann::json j;
        j["wavelength"] = s.wavelength;
        j["n_tx"] = s.n_tx;
        j["n_rx"] = s.n_rx;
        j["theta_target_deg"] = rad2deg(s.theta_target);
        j["theta_clutter_deg"] = rad2deg(s.theta_clutter);
        j["theta_user_deg"] = rad2deg(s.theta_user);
        j["target_gain"] = s.target_gain;
        j["clutter_gain"] = s.clutter_gain;
        j["path_gain"] = {s.path_gain.real(), s.path_gain.imag()};
        j["radar_noise"] = s.radar_noise;
        j["comm_noise"] = s.comm_noise;
        j["power_budget"] = s.power_budget;
        j["sensing_floor"] = s.sensing_floor;
        j["min_spacing"] = s.min_spacing;
        j["tx_aperture"] = s.tx_aperture;
        j["rx_aperture"] = s.rx_aperture;
        return j;
    }
}

#endif
