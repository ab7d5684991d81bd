// SPDX-License-Identifier: Apache-2.0
//
// flexarray: array configuration codebooks and training for flexible XL-MIMO
// Copyright (C) 2026 The flexarray authors
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

#ifndef FLEXARRAY_EXPERIMENT_HPP
#define FLEXARRAY_EXPERIMENT_HPP

#include "comms.hpp"
#include "localization.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef FLEXARRAY_VERSION
#define FLEXARRAY_VERSION "0.1.0"
#endif

namespace flexarray
{
    // Configuration of one experiment, read from an INI file with the sections
    // [experiment], [grid], [array], [scene], [sweep] and [localization]. See samples/ for the schema.
    struct ExperimentConfig
    {
        std::string kind = "codebook-counts"; // codebook-counts | comm-sweep | loc-sweep | param-surface
        std::vector<std::uint64_t> seeds;
        std::string output = "results.csv";

        int pixels = 64;
        double carrier_hz = 3.5e9;
        std::optional<double> pitch_m; // half wavelength when unset

        int activated = 8;
        int modules = 4;

        SceneParams scene;

        std::string axis;             // power | users (comm), snr | sources (loc)
        std::vector<double> values;
        std::vector<std::string> schemes; // empty: every scheme the experiment kind supports
        Arch surface_arch = Arch::CA;

        int sources = 4;
        int snapshots = 1000;
        double snr_db = -15.0;
        SpectrumMode mode = SpectrumMode::CoArray;
        double source_lo_deg = -45.0;
        double source_hi_deg = 45.0;
        AngleGrid search;
        std::vector<std::string> loc_archs{"CA", "USA", "MoA", "NA", "CPA"};

        boost::property_tree::ptree raw;

        AntennaGrid grid() const
        {
            const double lambda = speed_of_light / carrier_hz;
            return AntennaGrid(pixels, pitch_m.value_or(0.5 * lambda), lambda);
        }
    };

    namespace detail
    {
        inline std::vector<std::string> split_list(const std::string &s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                const auto b = item.find_first_not_of(" \t");
                const auto e = item.find_last_not_of(" \t");
                if (b != std::string::npos)
                    out.push_back(item.substr(b, e - b + 1));
            }
            return out;
        }

        inline double parse_double(const std::string &key, const std::string &v)
        {
            std::istringstream is(v);
            is.imbue(std::locale::classic());
            double d = 0.0;
            if (!(is >> d) || !(is >> std::ws).eof())
                throw std::invalid_argument("config: " + key + " = '" + v + "' is not a number");
            return d;
        }

        inline long parse_long(const std::string &key, const std::string &v)
        {
            const double d = parse_double(key, v);
            if (d != std::floor(d))
                throw std::invalid_argument("config: " + key + " = '" + v + "' is not an integer");
            return long(d);
        }

        // "1-20" or "3, 5, 8"
        inline std::vector<std::uint64_t> parse_seeds(const std::string &v)
        {
            std::vector<std::uint64_t> out;
            for (const auto &item : split_list(v))
            {
                const auto dash = item.find('-', 1);
                if (dash != std::string::npos)
                {
                    const long a = parse_long("experiment.seeds", item.substr(0, dash));
                    const long b = parse_long("experiment.seeds", item.substr(dash + 1));
                    if (a < 0 || b < a)
                        throw std::invalid_argument("config: experiment.seeds range '" + item + "' is invalid");
                    for (long s = a; s <= b; ++s)
                        out.push_back(std::uint64_t(s));
                }
                else
                {
                    const long s = parse_long("experiment.seeds", item);
                    if (s < 0)
                        throw std::invalid_argument("config: experiment.seeds must be non-negative");
                    out.push_back(std::uint64_t(s));
                }
            }
            return out;
        }

        inline const std::map<std::string, std::set<std::string>> &config_schema()
        {
            static const std::map<std::string, std::set<std::string>> schema = {
                {"experiment", {"kind", "seeds", "output"}},
                {"grid", {"pixels", "carrier_hz", "pitch_m"}},
                {"array", {"activated", "modules"}},
                {"scene", {"users", "paths", "center_x", "center_y", "radius", "scatter_range_max", "theta_min_deg",
                           "theta_max_deg", "power_dbm", "bandwidth_hz"}},
                {"sweep", {"axis", "values", "schemes", "arch"}},
                {"localization", {"sources", "snapshots", "snr_db", "mode", "source_lo_deg", "source_hi_deg",
                                  "search_lo_deg", "search_hi_deg", "search_step_deg", "archs"}},
            };
            return schema;
        }
    }

    inline ExperimentConfig parse_config(const boost::property_tree::ptree &pt)
    {
        const auto &schema = detail::config_schema();
        for (const auto &[section, body] : pt)
        {
            auto it = schema.find(section);
            if (it == schema.end())
                throw std::invalid_argument("config: unknown section [" + section + "]");
            for (const auto &[key, value] : body)
                if (!it->second.count(key))
                    throw std::invalid_argument("config: unknown key '" + section + "." + key + "'");
        }

        ExperimentConfig c;
        c.raw = pt;
        auto str = [&](const std::string &path) { return pt.get_optional<std::string>(path); };
        auto num = [&](const std::string &path, double &dst)
        {
            if (auto v = str(path))
                dst = detail::parse_double(path, *v);
        };
        auto integer = [&](const std::string &path, int &dst)
        {
            if (auto v = str(path))
                dst = int(detail::parse_long(path, *v));
        };

        if (auto v = str("experiment.kind"))
            c.kind = *v;
        if (auto v = str("experiment.output"))
            c.output = *v;
        c.seeds = detail::parse_seeds(str("experiment.seeds").value_or("1-20"));

        integer("grid.pixels", c.pixels);
        num("grid.carrier_hz", c.carrier_hz);
        if (auto v = str("grid.pitch_m"))
            c.pitch_m = detail::parse_double("grid.pitch_m", *v);

        integer("array.activated", c.activated);
        integer("array.modules", c.modules);

        c.scene.users = 4;
        integer("scene.users", c.scene.users);
        integer("scene.paths", c.scene.paths);
        num("scene.center_x", c.scene.center.x);
        num("scene.center_y", c.scene.center.y);
        num("scene.radius", c.scene.radius);
        num("scene.scatter_range_max", c.scene.scatter_range_max);
        num("scene.theta_min_deg", c.scene.theta_min_deg);
        num("scene.theta_max_deg", c.scene.theta_max_deg);
        num("scene.power_dbm", c.scene.power_dbm);
        if (auto v = str("scene.bandwidth_hz"))
        {
            const double b = detail::parse_double("scene.bandwidth_hz", *v);
            if (!(b > 0.0))
                throw std::invalid_argument("config: scene.bandwidth_hz must be positive");
            c.scene.noise_power_dbm = thermal_noise_dbm(b);
        }

        if (auto v = str("sweep.axis"))
            c.axis = *v;
        if (auto v = str("sweep.values"))
        {
            c.values.clear();
            for (const auto &item : detail::split_list(*v))
                c.values.push_back(detail::parse_double("sweep.values", item));
        }
        if (auto v = str("sweep.schemes"))
        {
            c.schemes = detail::split_list(*v);
            if (c.schemes.empty())
                throw std::invalid_argument("config: sweep.schemes must not be empty");
        }
        if (auto v = str("sweep.arch"))
            c.surface_arch = parse_arch(*v);

        integer("localization.sources", c.sources);
        integer("localization.snapshots", c.snapshots);
        num("localization.snr_db", c.snr_db);
        if (auto v = str("localization.mode"))
            c.mode = parse_mode(*v);
        num("localization.source_lo_deg", c.source_lo_deg);
        num("localization.source_hi_deg", c.source_hi_deg);
        num("localization.search_lo_deg", c.search.lo_deg);
        num("localization.search_hi_deg", c.search.hi_deg);
        num("localization.search_step_deg", c.search.step_deg);
        if (auto v = str("localization.archs"))
            c.loc_archs = detail::split_list(*v);
        return c;
    }

    inline std::vector<std::string> resolved_schemes(const ExperimentConfig &c)
    {
        if (!c.schemes.empty())
            return c.schemes;
        if (c.kind == "loc-sweep")
            return {"exhaustive", "two-stage"};
        return {"exhaustive", "two-stage", "greedy"};
    }

    // Checks every field the selected experiment uses; throws a named error on the first violation
    inline void validate(const ExperimentConfig &c)
    {
        auto fail = [](const std::string &m) { throw std::invalid_argument("config: " + m); };
        static const std::set<std::string> kinds{"codebook-counts", "comm-sweep", "loc-sweep", "param-surface"};
        if (!kinds.count(c.kind))
            fail("experiment.kind '" + c.kind + "' is not one of codebook-counts, comm-sweep, loc-sweep, param-surface");
        if (c.seeds.empty())
            fail("experiment.seeds must not be empty");
        if (c.output.empty())
            fail("experiment.output must not be empty");
        if (c.pixels < 2)
            fail("grid.pixels must be at least 2");
        if (!(c.carrier_hz > 0.0))
            fail("grid.carrier_hz must be positive");
        if (c.pitch_m && !(*c.pitch_m > 0.0))
            fail("grid.pitch_m must be positive");
        if (c.activated < 1 || c.activated > c.pixels)
            fail("array.activated must be in [1, grid.pixels]");
        if (c.modules < 1 || c.activated % c.modules != 0)
            fail("array.modules must divide array.activated");

        if (c.kind == "comm-sweep" || c.kind == "param-surface")
        {
            if (c.scene.users < 1)
                fail("scene.users must be at least 1");
            if (c.scene.paths < 1)
                fail("scene.paths must be at least 1");
            if (!(c.scene.radius >= 0.0) || !(c.scene.scatter_range_max > 0.0))
                fail("scene.radius and scene.scatter_range_max must be positive");
            if (!(c.scene.theta_min_deg >= -90.0 && c.scene.theta_max_deg <= 90.0 &&
                  c.scene.theta_min_deg <= c.scene.theta_max_deg))
                fail("scene.theta_min_deg / theta_max_deg must lie in [-90, 90]");
        }
        if (c.kind == "comm-sweep")
        {
            if (c.axis != "power" && c.axis != "users")
                fail("sweep.axis must be 'power' or 'users' for comm-sweep");
            for (const auto &s : resolved_schemes(c))
                if (s != "exhaustive" && s != "two-stage" && s != "greedy")
                    fail("sweep.schemes entry '" + s + "' is not exhaustive, two-stage or greedy");
        }
        if (c.kind == "loc-sweep")
        {
            if (c.axis != "snr" && c.axis != "sources")
                fail("sweep.axis must be 'snr' or 'sources' for loc-sweep");
            for (const auto &s : resolved_schemes(c))
                if (s != "exhaustive" && s != "two-stage")
                    fail("sweep.schemes entry '" + s + "' is not exhaustive or two-stage for loc-sweep");
            if (c.snapshots < 1)
                fail("localization.snapshots must be positive");
            if (c.sources < 1)
                fail("localization.sources must be positive");
            if (!(c.source_lo_deg > -90.0 && c.source_hi_deg < 90.0 && c.source_lo_deg < c.source_hi_deg))
                fail("localization.source_lo_deg / source_hi_deg must satisfy -90 < lo < hi < 90");
            c.search.angles();
            for (const auto &a : c.loc_archs)
                if (a != "ACC")
                    parse_arch(a);
        }
        if ((c.kind == "comm-sweep" || c.kind == "loc-sweep") && c.values.empty())
            fail("sweep.values must not be empty");
        if (c.kind == "comm-sweep" || c.kind == "loc-sweep")
            for (double v : c.values)
                if ((c.axis == "users" || c.axis == "sources") && (v < 1.0 || v != std::floor(v)))
                    fail("sweep.values must be positive integers for axis '" + c.axis + "'");
    }

    inline ExperimentConfig load_config(std::istream &is)
    {
        boost::property_tree::ptree pt;
        try
        {
            boost::property_tree::ini_parser::read_ini(is, pt);
        }
        catch (const boost::property_tree::ini_parser_error &e)
        {
            throw std::invalid_argument(std::string("config: ") + e.what());
        }
        return parse_config(pt);
    }

    inline ExperimentConfig load_config_file(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw std::runtime_error("cannot open config file '" + path + "'");
        return load_config(f);
    }

    struct SurfacePoint
    {
        int phi = 0;
        int ref_index = 0;
        double utility = 0.0;
    };

    struct SurfaceResult
    {
        Arch arch = Arch::CA;
        std::vector<SurfacePoint> points;
        double spread = 0.0; // max - min utility
    };

    // Sum rate of every feasible (phi, b) codeword of one architecture on a fixed scene
    inline SurfaceResult surface_sweep(const AntennaGrid &grid, int activated, int modules, Arch arch, const Scene &scene)
    {
        SurfaceResult res;
        res.arch = arch;
        SumRateUtility u(grid, scene);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto &cw : enumerate_arch(grid, arch, activated, modules))
        {
            const double v = u(cw);
            res.points.push_back({cw.phi, cw.ref_index, v});
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        res.spread = res.points.empty() ? 0.0 : hi - lo;
        return res;
    }

    inline void write_surface(std::ostream &os, const SurfaceResult &s)
    {
        os << "phi,ref_index,utility\n";
        for (const auto &p : s.points)
        {
            CsvWriter w(os);
            w.field(p.phi).field(p.ref_index).field(p.utility);
            w.end();
        }
    }

    // Per architecture: enumerated size, closed-form size, stage-1 size
    inline void write_codebook_counts(std::ostream &os, const AntennaGrid &grid, int activated, int modules)
    {
        os << "arch,count,closed_form,stage1\n";
        auto acc = build_acc(grid, activated, modules);
        long total_cf = 0, total_s1 = 0;
        for (Arch a : all_archs)
        {
            const long cf = closed_form_count(a, grid.pixels(), activated, modules);
            const long s1 = long(build_stage1_codebook(grid, a, activated, modules).size());
            total_cf += cf;
            total_s1 += s1;
            CsvWriter w(os);
            w.field(arch_name(a)).field(long(acc.count(a))).field(cf).field(s1);
            w.end();
        }
        CsvWriter w(os);
        w.field("total").field(long(acc.size())).field(total_cf).field(total_s1);
        w.end();
    }

    struct ExperimentSummary
    {
        std::size_t records = 0;
        std::string csv_path;
        std::string manifest_path;
        nlohmann::json extra = nlohmann::json::object();
    };

    namespace detail
    {
        inline std::vector<Arch> loc_arch_filter(const std::string &name)
        {
            if (name == "ACC")
                return {all_archs.begin(), all_archs.end()};
            return {parse_arch(name)};
        }

        inline nlohmann::json effective_config(const ExperimentConfig &c)
        {
            nlohmann::json j;
            j["experiment"] = {{"kind", c.kind}, {"seeds", c.seeds}, {"output", c.output}};
            const AntennaGrid g = c.grid();
            j["grid"] = {{"pixels", c.pixels}, {"carrier_hz", c.carrier_hz}, {"pitch_m", g.pitch()},
                         {"wavelength_m", g.wavelength()}};
            j["array"] = {{"activated", c.activated}, {"modules", c.modules}};
            j["scene"] = {{"users", c.scene.users},
                          {"paths", c.scene.paths},
                          {"center", {c.scene.center.x, c.scene.center.y}},
                          {"radius", c.scene.radius},
                          {"scatter_range_max", c.scene.scatter_range_max},
                          {"theta_deg", {c.scene.theta_min_deg, c.scene.theta_max_deg}},
                          {"power_dbm", c.scene.power_dbm},
                          {"noise_power_dbm", c.scene.noise_power_dbm}};
            j["sweep"] = {{"axis", c.axis}, {"values", c.values}, {"schemes", resolved_schemes(c)},
                          {"arch", std::string(arch_name(c.surface_arch))}};
            j["localization"] = {{"sources", c.sources},
                                 {"snapshots", c.snapshots},
                                 {"snr_db", c.snr_db},
                                 {"mode", std::string(mode_name(c.mode))},
                                 {"source_deg", {c.source_lo_deg, c.source_hi_deg}},
                                 {"search_deg", {c.search.lo_deg, c.search.hi_deg, c.search.step_deg}},
                                 {"archs", c.loc_archs}};
            return j;
        }

        inline nlohmann::json ptree_to_json(const boost::property_tree::ptree &pt)
        {
            nlohmann::json j = nlohmann::json::object();
            for (const auto &[k, v] : pt)
                j[k] = v.empty() ? nlohmann::json(v.data()) : ptree_to_json(v);
            return j;
        }
    }

    // Runs the experiment and writes its CSV to `csv`. Record order is (seed, sweep point, scheme).
    inline ExperimentSummary run_experiment_to(const ExperimentConfig &c, std::ostream &csv)
    {
        validate(c);
        ExperimentSummary sum;
        const AntennaGrid grid = c.grid();

        if (c.kind == "codebook-counts")
        {
            write_codebook_counts(csv, grid, c.activated, c.modules);
            sum.records = all_archs.size() + 1;
            sum.extra["total"] = build_acc(grid, c.activated, c.modules).size();
            sum.extra["worst_case_two_stage_overhead"] = worst_case_two_stage_overhead(grid, c.activated, c.modules);
        }
        else if (c.kind == "param-surface")
        {
            auto scene = generate_scene(grid, c.seeds.front(), c.scene);
            auto s = surface_sweep(grid, c.activated, c.modules, c.surface_arch, scene);
            write_surface(csv, s);
            sum.records = s.points.size();
            sum.extra["arch"] = std::string(arch_name(s.arch));
            sum.extra["spread"] = s.spread;
        }
        else if (c.kind == "comm-sweep")
        {
            write_comm_header(csv);
            const Codebook acc = build_acc(grid, c.activated, c.modules);
            for (auto seed : c.seeds)
                for (double v : c.values)
                {
                    SceneParams sp = c.scene;
                    if (c.axis == "power")
                        sp.power_dbm = v;
                    else
                        sp.users = int(v);
                    const Scene scene = generate_scene(grid, seed, sp);
                    const SumRateUtility u(grid, scene);
                    for (const auto &scheme : resolved_schemes(c))
                    {
                        CommRecord rec;
                        if (scheme == "exhaustive")
                            rec = make_comm_record(exhaustive_scan(acc, u), seed, sp.power_dbm, sp.users);
                        else if (scheme == "two-stage")
                            rec = make_comm_record(two_stage_scan(grid, c.activated, c.modules, u), seed, sp.power_dbm,
                                                   sp.users);
                        else
                            rec = make_comm_record(greedy_as(u.grid_channels(), u.snr(), c.activated), seed,
                                                   sp.power_dbm, sp.users);
                        write_comm_record(csv, rec);
                        ++sum.records;
                    }
                }
        }
        else // loc-sweep
        {
            write_rmse_header(csv);
            for (auto seed : c.seeds)
                for (double v : c.values)
                {
                    const double snr = c.axis == "snr" ? v : c.snr_db;
                    const int k = c.axis == "sources" ? int(v) : c.sources;
                    const auto scene = make_localization_scene(k, snr, c.snapshots, seed, c.source_lo_deg, c.source_hi_deg);
                    for (const auto &scheme : resolved_schemes(c))
                        for (const auto &an : c.loc_archs)
                        {
                            const auto ts = scheme == "exhaustive" ? TrainingScheme::Exhaustive : TrainingScheme::TwoStage;
                            auto r = localization_training(grid, c.activated, c.modules, scene, c.mode, ts,
                                                           detail::loc_arch_filter(an), c.search);
                            write_rmse_record(csv, make_rmse_record(r, snr, k, seed));
                            ++sum.records;
                        }
                }
        }
        return sum;
    }

    inline std::string manifest_path_for(const std::string &csv_path)
    {
        const auto dot = csv_path.rfind('.');
        const auto slash = csv_path.find_last_of("/\\");
        const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
        return (has_ext ? csv_path.substr(0, dot) : csv_path) + ".manifest.json";
    }

    // Runs the experiment, writes the CSV to c.output and a JSON manifest next to it
    inline ExperimentSummary run_experiment(const ExperimentConfig &c)
    {
        validate(c);
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream buf;
        auto sum = run_experiment_to(c, buf);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::ofstream f(c.output, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write '" + c.output + "'");
        f << buf.str();
        if (!f)
            throw std::runtime_error("write failed for '" + c.output + "'");
        sum.csv_path = c.output;

        nlohmann::json m;
        m["kind"] = c.kind;
        m["version"] = FLEXARRAY_VERSION;
        m["config"] = detail::effective_config(c);
        m["config_file"] = detail::ptree_to_json(c.raw);
        m["seeds"] = c.seeds;
        m["records"] = sum.records;
        m["output"] = c.output;
        m["wall_time_s"] = wall;
        m["results"] = sum.extra;

        sum.manifest_path = manifest_path_for(c.output);
        std::ofstream mf(sum.manifest_path, std::ios::binary);
        if (!mf)
            throw std::runtime_error("cannot write '" + sum.manifest_path + "'");
        mf << m.dump(2) << '\n';
        return sum;
    }
}

#endif
