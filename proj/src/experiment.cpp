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

#include "maisac/experiment.hpp"

#include "json_fields.hpp"
#include "maisac/rx_combiner.hpp"
#include "maisac/scene_io.hpp"
#include "maisac/tx_beamformer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#ifndef MAISAC_VERSION
#define MAISAC_VERSION "0.0.0"
#endif
#ifndef MAISAC_BUILD_TYPE
#define MAISAC_BUILD_TYPE "unknown"
#endif

namespace maisac
{
    using nlohmann::json;

    std::string to_string(SweepAxis a)
    {
        switch (a)
        {
        case SweepAxis::iterations:
            return "iterations";
        case SweepAxis::sensing_floor:
            return "sensing_floor";
        case SweepAxis::power:
            return "power";
        case SweepAxis::n_antennas:
            return "n_antennas";
        case SweepAxis::user_angle:
            return "user_angle";
        }
        return "?";
    }

    namespace
    {
        const std::map<std::string, SweepAxis> axis_names{{"iterations", SweepAxis::iterations},
                                                          {"sensing_floor", SweepAxis::sensing_floor},
                                                          {"power", SweepAxis::power},
                                                          {"n_antennas", SweepAxis::n_antennas},
                                                          {"user_angle", SweepAxis::user_angle}};

        const std::map<std::string, InitStrategy> init_names{{"uniform", InitStrategy::uniform},
                                                             {"random_feasible", InitStrategy::random_feasible}};

        std::string init_name(InitStrategy s)
        {
            for (const auto &[k, v] : init_names)
                if (v == s)
                    return k;
            return "provided";
        }

        bool sized_axis(SweepAxis a) { return a == SweepAxis::iterations || a == SweepAxis::n_antennas; }

        // shortest text that reads back to the same double
        std::string num(double v)
        {
            if (std::isnan(v))
                return "nan";
            char buf[64];
            auto r = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, r.ptr);
        }

        std::string csv_field(const std::string &s)
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
            {
                if (c == '"')
                    out += '"';
                out += c == '\n' ? ' ' : c;
            }
            return out + "\"";
        }

        void read_solver(detail::Fields &f, conic::SolverOptions &o)
        {
            o.feastol = f.number("feastol", o.feastol);
            o.abstol = f.number("abstol", o.abstol);
            o.reltol = f.number("reltol", o.reltol);
            o.feastol_inacc = f.number("feastol_inacc", o.feastol_inacc);
            o.abstol_inacc = f.number("abstol_inacc", o.abstol_inacc);
            o.reltol_inacc = f.number("reltol_inacc", o.reltol_inacc);
            o.max_iter = f.integer("max_iter", o.max_iter);
        }

        json solver_json(const conic::SolverOptions &o)
        {
            return {{"feastol", o.feastol},
                    {"abstol", o.abstol},
                    {"reltol", o.reltol},
                    {"feastol_inacc", o.feastol_inacc},
                    {"abstol_inacc", o.abstol_inacc},
                    {"reltol_inacc", o.reltol_inacc},
                    {"max_iter", o.max_iter}};
        }

        void read_bcd(detail::Fields &f, BcdOptions &b)
        {
            b.eps = f.number("eps", b.eps);
            b.max_outer = f.integer("max_outer", b.max_outer);
            if (f.has("init"))
            {
                const std::string s = f.text("init", "");
                auto it = init_names.find(s);
                if (it == init_names.end())
                    f.fail("init", "expected \"uniform\" or \"random_feasible\", got \"" + s + "\"");
                b.init = it->second;
            }
            b.sca.tol = f.number("sca_tol", b.sca.tol);
            b.sca.max_iter = f.integer("sca_max_iter", b.sca.max_iter);
            b.position.tol = f.number("position_tol", b.position.tol);
            b.position.max_iter = f.integer("position_max_iter", b.position.max_iter);
            b.position.trust.radius = f.number("trust_radius", b.position.trust.radius);
            b.rank1_tol = f.number("rank1_tol", b.rank1_tol);
            b.rank1_candidates = f.integer("rank1_candidates", b.rank1_candidates);
            b.refine.max_iter = f.integer("refine_max_iter", b.refine.max_iter);
            b.refine.tol = f.number("refine_tol", b.refine.tol);
            if (f.has("solver"))
            {
                detail::Fields s(f.raw("solver"), f.origin(), f.prefix() + "solver.");
                read_solver(s, b.sca.solver);
                s.finish();
                b.position.solver = b.sca.solver;
                b.refine.solver = b.sca.solver;
            }
        }

        json bcd_json(const BcdOptions &b)
        {
            return {{"eps", b.eps},
                    {"max_outer", b.max_outer},
                    {"init", init_name(b.init)},
                    {"sca_tol", b.sca.tol},
                    {"sca_max_iter", b.sca.max_iter},
                    {"position_tol", b.position.tol},
                    {"position_max_iter", b.position.max_iter},
                    {"trust_radius", b.position.trust.radius},
                    {"rank1_tol", b.rank1_tol},
                    {"rank1_candidates", b.rank1_candidates},
                    {"refine_max_iter", b.refine.max_iter},
                    {"refine_tol", b.refine.tol},
                    {"solver", solver_json(b.sca.solver)}};
        }

        json cvec_json(const Eigen::VectorXcd &v)
        {
            json a = json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i)
                a.push_back({v(i).real(), v(i).imag()});
            return a;
        }

        json rvec_json(const Eigen::VectorXd &v)
        {
            json a = json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i)
                a.push_back(v(i));
            return a;
        }

        Eigen::VectorXcd cvec_from(const json &a)
        {
            Eigen::VectorXcd v(a.size());
            for (size_t i = 0; i < a.size(); ++i)
                v(Eigen::Index(i)) = {a[i][0].get<double>(), a[i][1].get<double>()};
            return v;
        }

        Eigen::VectorXd rvec_from(const json &a)
        {
            Eigen::VectorXd v(a.size());
            for (size_t i = 0; i < a.size(); ++i)
                v(Eigen::Index(i)) = a[i].get<double>();
            return v;
        }

        std::string utc_now()
        {
            const std::time_t t = std::time(nullptr);
            std::tm tm{};
            gmtime_r(&t, &tm);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
            return buf;
        }

        void write_file(const std::filesystem::path &p, const std::string &text)
        {
            std::ofstream out(p, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + p.string());
            out << text;
            if (!out)
                throw std::runtime_error("write failed: " + p.string());
        }
    }

    void ExperimentSpec::validate() const
    {
        auto bad = [](const std::string &m)
        { throw ConfigError(m); };
        if (name.empty() || name.find_first_of("/\\") != std::string::npos)
            bad("name must be a non-empty file stem");
        if (values.empty())
            bad("values must not be empty");
        if (schemes.empty())
            bad("schemes must not be empty");
        if (seeds.empty())
            bad("seeds must not be empty");
        if (!(user_jitter_deg >= 0) || user_jitter_deg >= 90)
            bad("user_jitter_deg must lie in [0, 90)");
        if (threads < 0)
            bad("threads must be >= 0");
        for (double v : values)
        {
            if (!std::isfinite(v))
                bad("values must be finite");
            if (sized_axis(axis) && (v < 1 || v != std::floor(v)))
                bad("values on the " + to_string(axis) + " axis must be positive integers");
            if (axis == SweepAxis::power && !(v > 0))
                bad("power values must be > 0");
            if (axis == SweepAxis::user_angle && !(v > 0 && v < 180))
                bad("user_angle values must lie in (0, 180) degrees");
            if (axis == SweepAxis::sensing_floor && v < 0)
                bad("sensing_floor values must be >= 0");
            if (axis == SweepAxis::sensing_floor && floor_mode == FloorMode::relative && v > 1)
                bad("relative sensing_floor values are shares in [0, 1]");
        }
        if (floor_mode == FloorMode::relative && axis != SweepAxis::sensing_floor && scene.sensing_floor > 1)
            bad("with floor_mode \"relative\" scene.sensing_floor is a share in [0, 1]");
        try
        {
            bcd.validate();
        }
        catch (const InvalidParameter &e)
        {
            bad(std::string("bcd: ") + e.what());
        }
    }

    ExperimentSpec parse_experiment(const std::string &text, const std::string &origin)
    {
        const json j = detail::parse_json(text, origin);
        detail::Fields f(j, origin, "");
        ExperimentSpec spec;
        spec.name = f.text("name", spec.name);
        if (f.has("scene"))
        {
            detail::Fields s(f.raw("scene"), origin, "scene.");
            spec.scene = detail::scene_from_fields(s);
            s.finish();
        }
        if (!f.has("axis"))
            f.fail("axis", "missing (one of iterations, sensing_floor, power, n_antennas, user_angle)");
        {
            const std::string a = f.text("axis", "");
            auto it = axis_names.find(a);
            if (it == axis_names.end())
                f.fail("axis", "unknown axis \"" + a + "\"");
            spec.axis = it->second;
        }
        if (!f.has("values"))
            f.fail("values", "missing");
        {
            const json &v = f.raw("values");
            if (!v.is_array() || v.empty())
                f.fail("values", "expected a non-empty array of numbers");
            for (const json &e : v)
            {
                if (!e.is_number())
                    f.fail("values", "expected a non-empty array of numbers");
                spec.values.push_back(e.get<double>());
            }
        }
        if (f.has("floor_mode"))
        {
            const std::string m = f.text("floor_mode", "");
            if (m == "absolute")
                spec.floor_mode = FloorMode::absolute;
            else if (m == "relative")
                spec.floor_mode = FloorMode::relative;
            else
                f.fail("floor_mode", "expected \"absolute\" or \"relative\"");
        }
        if (f.has("schemes"))
        {
            const json &v = f.raw("schemes");
            if (!v.is_array() || v.empty())
                f.fail("schemes", "expected a non-empty array of scheme names");
            spec.schemes.clear();
            for (const json &e : v)
            {
                if (!e.is_string())
                    f.fail("schemes", "expected a non-empty array of scheme names");
                try
                {
                    spec.schemes.push_back(scheme_from_string(e.get<std::string>()));
                }
                catch (const InvalidParameter &ex)
                {
                    f.fail("schemes", ex.what());
                }
            }
        }
        if (f.has("seeds"))
        {
            const json &v = f.raw("seeds");
            spec.seeds.clear();
            if (v.is_number_unsigned() && v.get<std::uint64_t>() > 0)
            {
                for (std::uint64_t s = 0; s < v.get<std::uint64_t>(); ++s)
                    spec.seeds.push_back(s);
            }
            else if (v.is_array() && !v.empty())
            {
                for (const json &e : v)
                {
                    if (!e.is_number_unsigned())
                        f.fail("seeds", "expected a count or an array of non-negative integers");
                    spec.seeds.push_back(e.get<std::uint64_t>());
                }
            }
            else
                f.fail("seeds", "expected a count or an array of non-negative integers");
        }
        spec.user_jitter_deg = f.number("user_jitter_deg", spec.user_jitter_deg);
        spec.threads = f.integer("threads", spec.threads);
        if (f.has("bcd"))
        {
            detail::Fields b(f.raw("bcd"), origin, "bcd.");
            read_bcd(b, spec.bcd);
            b.finish();
        }
        f.finish();
        try
        {
            spec.validate();
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(origin + ": " + e.what());
        }
        return spec;
    }

    ExperimentSpec load_experiment(const std::string &path) { return parse_experiment(read_text_file(path), path); }

    std::string experiment_to_json(const ExperimentSpec &spec, int indent)
    {
        json j;
        j["name"] = spec.name;
        j["scene"] = detail::scene_json(spec.scene);
        j["axis"] = to_string(spec.axis);
        j["values"] = spec.values;
        j["floor_mode"] = spec.floor_mode == FloorMode::relative ? "relative" : "absolute";
        json s = json::array();
        for (Scheme sc : spec.schemes)
            s.push_back(to_string(sc));
        j["schemes"] = s;
        j["seeds"] = spec.seeds;
        j["user_jitter_deg"] = spec.user_jitter_deg;
        j["threads"] = spec.threads;
        j["bcd"] = bcd_json(spec.bcd);
        return j.dump(indent);
    }

    double relative_floor(const SceneConfig &scene, double rho)
    {
        SceneConfig s = scene;
        s.sensing_floor = 0;
        const ArrayLayout l = init_layout(s, InitStrategy::uniform);
        const SensingCapacity cap = max_sensing(build_psi_operators(l, s), s);
        if (!cap.ok)
            throw InvalidParameter("relative floor: sensing capacity solve failed");
        const Eigen::VectorXcd h = channel(l, s);
        const Eigen::VectorXcd mrt = h / h.norm() * std::sqrt(s.power_budget);
        const double g0 = mvdr_snr_closedform(mrt, l, s);
        return g0 + rho * std::max(0.0, cap.gamma_max - g0);
    }

    SceneConfig cell_scene(const ExperimentSpec &spec, double value, std::uint64_t seed)
    {
        SceneConfig s = spec.scene;
        switch (spec.axis)
        {
        case SweepAxis::iterations:
        case SweepAxis::n_antennas:
            s.n_tx = s.n_rx = int(value);
            break;
        case SweepAxis::power:
            s.power_budget = value;
            break;
        case SweepAxis::sensing_floor:
            s.sensing_floor = value;
            break;
        case SweepAxis::user_angle:
            s.theta_user = deg2rad(value);
            break;
        }
        if (spec.user_jitter_deg > 0)
        {
            std::mt19937_64 rng(seed);
            const double unit = double(rng() >> 11) * 0x1p-53;
            s.theta_user += deg2rad(spec.user_jitter_deg * (2 * unit - 1));
        }
        if (spec.floor_mode == FloorMode::relative)
        {
            const double share = s.sensing_floor;
            s.sensing_floor = 0;
            s.validate();
            s.sensing_floor = relative_floor(s, share);
        }
        s.validate();
        return s;
    }

    CellResult run_cell(const ExperimentSpec &spec, Scheme scheme, std::uint64_t seed, double value)
    {
        CellResult c;
        c.scheme = scheme;
        c.seed = seed;
        c.value = value;
        c.scene = spec.scene;
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            c.scene = cell_scene(spec, value, seed);
            BcdOptions o = spec.bcd;
            o.seed = seed;
            switch (scheme)
            {
            case Scheme::ma:
                c.result = run_bcd(c.scene, o);
                break;
            case Scheme::fpa:
                c.result = solve_fpa(c.scene, o);
                break;
            case Scheme::gradient:
                c.result = solve_gradient_positions(c.scene, o);
                break;
            case Scheme::zf:
            {
                BcdResult &r = c.result;
                r.layout = r.initial_layout = init_layout(c.scene, InitStrategy::uniform);
                r.w = solve_zf(r.layout, c.scene).w;
                r.u = mvdr_combiner(r.w, r.layout, c.scene).u.u;
                const SnrReport rep = evaluate(r.w, r.u, r.layout, c.scene);
                r.gamma_t = r.initial_gamma_t = rep.gamma_t;
                r.gamma_r = rep.gamma_r;
                r.capacity = rep.capacity;
                r.status = BcdStatus::converged;
                break;
            }
            }
            c.status = to_string(c.result.status);
            c.message = c.result.stage.empty() ? c.result.message : c.result.stage + ": " + c.result.message;
            if (c.result.w.size() == c.scene.n_tx && c.result.u.size() == c.scene.n_rx)
                c.audit_pass = audit_solution(c.result.w, c.result.u, c.result.layout, c.scene).pass();
        }
        catch (const std::exception &e)
        {
            c.status = "failed";
            c.message = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return c;
    }

    bool ExperimentResult::all_ok() const
    {
        return std::all_of(cells.begin(), cells.end(), [](const CellResult &c)
                           { return c.ok(); });
    }

    ExperimentResult run_experiment(const ExperimentSpec &spec)
    {
        spec.validate();
        struct Key
        {
            Scheme scheme;
            std::uint64_t seed;
            double value;
        };
        std::vector<Key> keys;
        for (double v : spec.values)
            for (Scheme s : spec.schemes)
                for (std::uint64_t seed : spec.seeds)
                    keys.push_back({s, seed, v});

        ExperimentResult res;
        res.cells.resize(keys.size());
        int workers = spec.threads > 0 ? spec.threads : int(std::max(1u, std::thread::hardware_concurrency()));
        workers = std::min<int>(workers, int(keys.size()));
        std::atomic<size_t> next{0};
        auto work = [&]
        {
            for (size_t i = next++; i < keys.size(); i = next++)
                res.cells[i] = run_cell(spec, keys[i].scheme, keys[i].seed, keys[i].value);
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < workers; ++t)
            pool.emplace_back(work);
        work();
        for (auto &t : pool)
            t.join();
        return res;
    }

    std::string results_csv(const ExperimentSpec &spec, const ExperimentResult &res)
    {
        std::ostringstream out;
        out << "scheme,seed,axis,value,n_tx,n_rx,power_budget,sensing_floor,theta_user_deg,"
               "gamma_t,gamma_r,capacity,iterations,rank_ratio,status,audit,message\n";
        for (const CellResult &c : res.cells)
        {
            const bool has = c.result.w.size() > 0;
            const double nan = std::nan("");
            out << to_string(c.scheme) << ',' << c.seed << ',' << to_string(spec.axis) << ',' << num(c.value) << ','
                << c.scene.n_tx << ',' << c.scene.n_rx << ',' << num(c.scene.power_budget) << ','
                << num(c.scene.sensing_floor) << ',' << num(rad2deg(c.scene.theta_user)) << ','
                << num(has ? c.result.gamma_t : nan) << ',' << num(has ? c.result.gamma_r : nan) << ','
                << num(has ? c.result.capacity : nan) << ',' << c.result.iterations << ','
                << num(c.result.rank_ratio) << ',' << c.status << ',' << (c.audit_pass ? "pass" : "fail") << ','
                << csv_field(c.message) << '\n';
        }
        return out.str();
    }

    std::string trace_csv(const ExperimentSpec &spec, const ExperimentResult &res)
    {
        std::ostringstream out;
        out << "scheme,seed,axis,value,iteration,gamma_t,gamma_r,capacity,rank_ratio,"
               "w_accepted,x_accepted,y_accepted,note\n";
        for (const CellResult &c : res.cells)
        {
            if (c.result.w.size() == 0)
                continue;
            const std::string key = to_string(c.scheme) + ',' + std::to_string(c.seed) + ',' +
                                    to_string(spec.axis) + ',' + num(c.value) + ',';
            out << key << 0 << ',' << num(c.result.initial_gamma_t) << ",,"
                << num(capacity(c.result.initial_gamma_t)) << ",,,,,start\n";
            for (const BcdIteration &it : c.result.trace)
                out << key << it.iteration << ',' << num(it.gamma_t) << ',' << num(it.gamma_r) << ','
                    << num(it.capacity) << ',' << num(it.rank_ratio) << ',' << int(it.w_accepted) << ','
                    << int(it.x_accepted) << ',' << int(it.y_accepted) << ',' << csv_field(it.note) << '\n';
        }
        return out.str();
    }

    std::string snapshots_jsonl(const ExperimentResult &res)
    {
        std::string out;
        for (const CellResult &c : res.cells)
        {
            json j;
            j["scheme"] = to_string(c.scheme);
            j["seed"] = c.seed;
            j["value"] = c.value;
            j["status"] = c.status;
            j["scene"] = detail::scene_json(c.scene);
            j["w"] = cvec_json(c.result.w);
            j["u"] = cvec_json(c.result.u);
            j["x"] = rvec_json(c.result.layout.tx());
            j["y"] = rvec_json(c.result.layout.rx());
            j["gamma_t"] = c.result.gamma_t;
            j["gamma_r"] = c.result.gamma_r;
            out += j.dump() + "\n";
        }
        return out;
    }

    std::vector<Snapshot> parse_snapshots(const std::string &jsonl)
    {
        std::vector<Snapshot> out;
        std::istringstream in(jsonl);
        std::string line;
        int n = 0;
        while (std::getline(in, line))
        {
            ++n;
            if (line.empty())
                continue;
            const std::string origin = "snapshot line " + std::to_string(n);
            const json j = detail::parse_json(line, origin);
            try
            {
                Snapshot s;
                s.scheme = scheme_from_string(j.at("scheme").get<std::string>());
                s.seed = j.at("seed").get<std::uint64_t>();
                s.value = j.at("value").get<double>();
                detail::Fields f(j.at("scene"), origin, "scene.");
                s.scene = detail::scene_from_fields(f);
                f.finish();
                s.w = cvec_from(j.at("w"));
                s.u = cvec_from(j.at("u"));
                s.layout = ArrayLayout(rvec_from(j.at("x")), rvec_from(j.at("y")));
                s.gamma_t = j.at("gamma_t").is_null() ? std::nan("") : j.at("gamma_t").get<double>();
                s.gamma_r = j.at("gamma_r").is_null() ? std::nan("") : j.at("gamma_r").get<double>();
                out.push_back(std::move(s));
            }
            catch (const json::exception &e)
            {
                throw ConfigError(origin + ": " + e.what());
            }
            catch (const InvalidParameter &e)
            {
                throw ConfigError(origin + ": " + e.what());
            }
        }
        return out;
    }

    std::vector<std::string> write_outputs(const ExperimentSpec &spec, const ExperimentResult &res,
                                           const std::string &dir)
    {
        namespace fs = std::filesystem;
        const fs::path root(dir);
        fs::create_directories(root);
        const fs::path results = root / (spec.name + ".csv");
        const fs::path trace = root / (spec.name + "_trace.csv");
        const fs::path snaps = root / (spec.name + "_snapshots.jsonl");
        const fs::path manifest = root / (spec.name + "_manifest.json");
        const fs::path timings = root / (spec.name + "_timings.json");

        write_file(results, results_csv(spec, res));
        write_file(trace, trace_csv(spec, res));
        write_file(snaps, snapshots_jsonl(res));

        json m;
        m["name"] = spec.name;
        m["version"] = MAISAC_VERSION;
        m["csv_schema"] = 1;
        m["build_type"] = MAISAC_BUILD_TYPE;
        m["compiler"] = __VERSION__;
        m["spec"] = json::parse(experiment_to_json(spec));
        m["tolerances"] = {{"bcd_eps", spec.bcd.eps},
                           {"sca_tol", spec.bcd.sca.tol},
                           {"position_tol", spec.bcd.position.tol},
                           {"rank1_tol", spec.bcd.rank1_tol},
                           {"solver", solver_json(spec.bcd.sca.solver)}};
        m["seeds"] = spec.seeds;
        m["cells"] = res.cells.size();
        std::map<std::string, int> counts;
        for (const CellResult &c : res.cells)
            ++counts[c.status];
        m["status_counts"] = counts;
        m["all_ok"] = res.all_ok();
        m["files"] = {results.filename().string(), trace.filename().string(), snaps.filename().string(),
                      timings.filename().string()};
        write_file(manifest, m.dump(2) + "\n");

        json t;
        t["finished_utc"] = utc_now();
        double total = 0;
        json cells = json::array();
        for (const CellResult &c : res.cells)
        {
            total += c.seconds;
            double u = 0, w = 0, x = 0, y = 0;
            for (const BcdIteration &it : c.result.trace)
            {
                u += it.seconds_u;
                w += it.seconds_w;
                x += it.seconds_x;
                y += it.seconds_y;
            }
            cells.push_back({{"scheme", to_string(c.scheme)},
                             {"seed", c.seed},
                             {"value", c.value},
                             {"seconds", c.seconds},
                             {"seconds_u", u},
                             {"seconds_w", w},
                             {"seconds_x", x},
                             {"seconds_y", y}});
        }
        t["cell_seconds_total"] = total;
        t["cells"] = cells;
        write_file(timings, t.dump(2) + "\n");
        return {results.string(), trace.string(), snaps.string(), manifest.string(), timings.string()};
    }

    std::string inspect_report(const SceneConfig &scene, Scheme scheme, const CellResult &c)
    {
        std::ostringstream out;
        out << "scheme " << to_string(scheme) << ", N_T " << scene.n_tx << ", N_R " << scene.n_rx << ", P "
            << scene.power_budget << ", Gamma " << scene.sensing_floor << ", theta_user "
            << rad2deg(scene.theta_user) << " deg\n\n";
        out << std::setw(5) << "iter" << std::setw(14) << "gamma_t" << std::setw(14) << "gamma_r" << std::setw(11)
            << "capacity" << std::setw(11) << "rank" << "  w x y  note\n";
        out << std::setw(5) << 0 << std::setw(14) << std::setprecision(8) << c.result.initial_gamma_t << "\n";
        for (const BcdIteration &it : c.result.trace)
        {
            out << std::setw(5) << it.iteration << std::setw(14) << std::setprecision(8) << it.gamma_t
                << std::setw(14) << it.gamma_r << std::setw(11) << std::setprecision(5) << it.capacity
                << std::setw(11) << std::setprecision(3) << it.rank_ratio << "  " << (it.w_accepted ? '+' : '.')
                << ' ' << (it.x_accepted ? '+' : '.') << ' ' << (it.y_accepted ? '+' : '.') << "  " << it.note
                << "\n";
        }
        out << "\nstatus " << c.status;
        if (!c.message.empty())
            out << " (" << c.message << ")";
        out << ", " << c.result.iterations << " iterations\n";
        if (c.result.w.size() != scene.n_tx || c.result.u.size() != scene.n_rx)
        {
            out << "no solution to audit\n";
            return out.str();
        }
        out << std::setprecision(10) << "gamma_t " << c.result.gamma_t << "  gamma_r " << c.result.gamma_r
            << "  capacity " << c.result.capacity << " bit/s/Hz\n\n";
        const ConstraintAudit audit = audit_solution(c.result.w, c.result.u, c.result.layout, scene);
        for (const AuditCheck &a : audit.checks)
            out << (a.pass ? "PASS " : "FAIL ") << std::left << std::setw(15) << a.name << std::right
                << std::setprecision(6) << " value " << a.value << "  limit " << a.limit << "\n";
        out << "audit " << (audit.pass() ? "pass" : "fail") << "\n";
        return out.str();
    }
}
