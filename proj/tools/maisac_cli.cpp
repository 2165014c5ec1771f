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

// maisac run <spec.json>      sweep an experiment, write CSV + manifest
// maisac inspect <scene.json> solve one scene and print the iteration table and audit
//
// Exit status: 0 when every cell ends converged or max-iter, 1 otherwise, 2 on bad input.

#include "CLI11.hpp"
#include "maisac/experiment.hpp"
#include "maisac/scene_io.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

using namespace maisac;

namespace
{
    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<double> tol;
        std::optional<int> max_iter;
        std::vector<std::string> schemes;
        std::string out_dir;
    };

    void add_common(CLI::App *cmd, Overrides &o)
    {
        cmd->add_option("--seed", o.seed, "Run only this seed");
        cmd->add_option("--tol", o.tol, "Outer convergence tolerance on |gamma_t change|")->check(CLI::PositiveNumber);
        cmd->add_option("--max-iter", o.max_iter, "Outer iteration cap")->check(CLI::PositiveNumber);
        cmd->add_option("--scheme", o.schemes, "Scheme(s): ma, fpa, zf, gradient");
    }

    void apply(BcdOptions &b, const Overrides &o)
    {
        if (o.tol)
            b.eps = *o.tol;
        if (o.max_iter)
            b.max_outer = *o.max_iter;
    }

    int run(const std::string &path, const Overrides &o, int threads)
    {
        ExperimentSpec spec = load_experiment(path);
        apply(spec.bcd, o);
        if (o.seed)
            spec.seeds = {*o.seed};
        if (!o.schemes.empty())
        {
            spec.schemes.clear();
            for (const std::string &s : o.schemes)
                spec.schemes.push_back(scheme_from_string(s));
        }
        if (threads > 0)
            spec.threads = threads;
        spec.validate();

        const size_t n = spec.values.size() * spec.schemes.size() * spec.seeds.size();
        std::cerr << spec.name << ": " << n << " cells on the " << to_string(spec.axis) << " axis\n";
        const ExperimentResult res = run_experiment(spec);
        const std::string dir = o.out_dir.empty() ? "out" : o.out_dir;
        for (const std::string &p : write_outputs(spec, res, dir))
            std::cout << p << "\n";
        int bad = 0;
        for (const CellResult &c : res.cells)
            if (!c.ok())
            {
                ++bad;
                std::cerr << "  " << to_string(c.scheme) << " seed " << c.seed << " value " << c.value << ": "
                          << c.status << (c.message.empty() ? "" : " (" + c.message + ")") << "\n";
            }
        std::cerr << (n - bad) << "/" << n << " cells converged or hit the iteration cap\n";
        return bad == 0 ? 0 : 1;
    }

    int inspect(const std::string &path, const Overrides &o)
    {
        ExperimentSpec spec;
        spec.scene = load_scene(path);
        spec.axis = SweepAxis::sensing_floor;
        spec.values = {spec.scene.sensing_floor};
        apply(spec.bcd, o);
        if (o.schemes.size() > 1)
            throw ConfigError("inspect takes a single --scheme");
        const Scheme scheme = o.schemes.empty() ? Scheme::ma : scheme_from_string(o.schemes.front());
        spec.schemes = {scheme};
        spec.seeds = {o.seed.value_or(0)};
        spec.validate();

        ExperimentResult res;
        res.cells.push_back(run_cell(spec, scheme, spec.seeds.front(), spec.values.front()));
        const CellResult &c = res.cells.front();
        std::cout << inspect_report(c.scene, scheme, c);
        std::cerr << "solved in " << c.seconds << " s\n";
        if (!o.out_dir.empty())
        {
            spec.name = "inspect";
            for (const std::string &p : write_outputs(spec, res, o.out_dir))
                std::cerr << p << "\n";
        }
        return c.ok() ? 0 : 1;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Movable-antenna ISAC beamforming experiments"};
    app.require_subcommand(1);
    Overrides o;
    int threads = 0;
    std::string spec_path, scene_path;

    CLI::App *run_cmd = app.add_subcommand("run", "Run an experiment spec and write CSV + manifest");
    run_cmd->add_option("spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out-dir", o.out_dir, "Output directory (default ./out)");
    run_cmd->add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    add_common(run_cmd, o);

    CLI::App *insp = app.add_subcommand("inspect", "Solve one scene and print the iteration table and audit");
    insp->add_option("scene", scene_path, "Scene (JSON)")->required()->check(CLI::ExistingFile);
    insp->add_option("--out-dir", o.out_dir, "Also write CSV, snapshot and manifest here");
    add_common(insp, o);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (run_cmd->parsed())
            return run(spec_path, o, threads);
        return inspect(scene_path, o);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const InvalidParameter &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
