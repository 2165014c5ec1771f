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

#ifndef MAISAC_ERRORS_HPP
#define MAISAC_ERRORS_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace maisac
{
    // Bad scalar/vector argument (non-finite, out of range, wrong dimension)
    class InvalidParameter : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // MVDR direction undefined because the transmit beam has no gain toward the target
    class DegenerateDirection : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Position anchor violates the minimum spacing it is supposed to linearize
    class InvalidAnchor : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Malformed conic program (unregistered variable, bad cone dimension)
    class BuildError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // No randomized candidate met the sensing floor; carries the best infeasible one
    class ExtractionFailure : public std::runtime_error
    {
    public:
        ExtractionFailure(const std::string &what, Eigen::VectorXcd best)
            : std::runtime_error(what), best_candidate(std::move(best)) {}
        Eigen::VectorXcd best_candidate;
    };

    // Scene/spec file problems; message names the offending field
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
