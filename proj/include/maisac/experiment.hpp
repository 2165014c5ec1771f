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

#ifndef MAISAC_EXPERIMENT_HPP
#define MAISAC_EXPERIMENT_HPP

// Parameter sweeps: a spec names a base scene, one swept axis, the schemes and the seeds.
// Every (scheme, seed, value) cell is solved independently; results are merged in cell order
// so the output does not depend on the number of worker threads.

#include "maisac/baselines.hpp"
#include "maisac/bcd.hpp"
#include "maisac/scene.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maisac
{
    enum class SweepAxis
    {
        iterations,    // values are array sizes; the trace file carries the per-pass curve
        sensing_floor, // values are Gamma (or shares, see FloorMode)
        power,         // values are P in W
        n_antennas,    // values are N_T = N_R
        user_angle     // values are theta_user in degrees
    };

    std::string to_string(SweepAxis a);

    enum class FloorMode
    {
        absolute,
        // the floor is a share rho in [0, 1]: Gamma = g0 + rho (gmax - g0), where g0 is the sensing SNR of
        // the full-power MRT beam and gmax the largest attainable one, both at the uniform start layout
        relative
    };

    struct ExperimentSpec
    {
        std::string name = "experiment";
        SceneConfig scene;
        SweepAxis axis = SweepAxis::sensing_floor;
        std::vector<double> values;
        FloorMode floor_mode = FloorMode::absolute;
        std::vector<Scheme> schemes{Scheme::ma, Scheme::fpa};
        std::vector<std::uint64_t> seeds{0};
        double user_jitter_deg = 0; // seed s moves theta_user by a uniform draw in [-j, j]
        BcdOptions bcd;
        int threads = 0; // 0: hardware concurrency

        void validate() const; // throws ConfigError
    };

    ExperimentSpec parse_experiment(const std::string &text, const std::string &origin = "<spec>");
    ExperimentSpec load_experiment(const std::string &path);
    std::string experiment_to_json(const ExperimentSpec &spec, int indent = 2);

    // The scene a cell is solved on (axis value, jitter and floor applied). Throws InvalidParameter.
    SceneConfig cell_scene(const ExperimentSpec &spec, double value, std::uint64_t seed);

    // Floor for a share rho on the given scene, see FloorMode::relative
    double relative_floor(const SceneConfig &scene, double rho);

    struct CellResult
    {
        Scheme scheme = Scheme::ma;
        std::uint64_t seed = 0;
        double value = 0;
        SceneConfig scene;
        std::string status = "failed"; // a BcdStatus string
        std::string message;
        BcdResult result; // ZF cells fill w, u, layout and the SNRs only
        bool audit_pass = false;
        double seconds = 0;

        bool ok() const { return status == "converged" || status == "max-iter"; }
    };

    // Never throws for a bad cell: the failure goes into status and message
    CellResult run_cell(const ExperimentSpec &spec, Scheme scheme, std::uint64_t seed, double value);

    struct ExperimentResult
    {
        std::vector<CellResult> cells; // value-major, then scheme, then seed

        bool all_ok() const;
    };

    ExperimentResult run_experiment(const ExperimentSpec &spec);

    // Writes <name>.csv, <name>_trace.csv, <name>_snapshots.jsonl, <name>_manifest.json and
    // <name>_timings.json into dir (created if missing). Everything except the timings file is a
    // pure function of the spec. Returns the paths written.
    std::vector<std::string> write_outputs(const ExperimentSpec &spec, const ExperimentResult &res,
                                           const std::string &dir);

    std::string results_csv(const ExperimentSpec &spec, const ExperimentResult &res);
    std::string trace_csv(const ExperimentSpec &spec, const ExperimentResult &res);

    // One JSON line per cell: key, scene, w, u, x, y and the reported SNRs
    std::string snapshots_jsonl(const ExperimentResult &res);

    struct Snapshot
    {
        Scheme scheme = Scheme::ma;
        std::uint64_t seed = 0;
        double value = 0;
        SceneConfig scene;
        Eigen::VectorXcd w, u;
        ArrayLayout layout;
        double gamma_t = 0, gamma_r = 0;
    };

    std::vector<Snapshot> parse_snapshots(const std::string &jsonl);

    // Human-readable per-iteration table plus the constraint audit
    std::string inspect_report(const SceneConfig &scene, Scheme scheme, const CellResult &cell);
}

#endif
