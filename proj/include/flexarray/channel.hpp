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

#ifndef FLEXARRAY_CHANNEL_HPP
#define FLEXARRAY_CHANNEL_HPP

#include "grid.hpp"
#include "rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <limits>
#include <locale>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace flexarray
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;

    inline double dbm_to_watt(double dbm) { return std::pow(10.0, 0.1 * (dbm - 30.0)); }
    inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
    inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

    // Thermal noise floor in [dBm] for a bandwidth in [Hz], noise figure 0 dB
    inline double thermal_noise_dbm(double bandwidth_hz) { return -174.0 + 10.0 * std::log10(bandwidth_hz); }

    // Point in the array plane in [m]; the array lies on the y-axis
    struct Point2
    {
        double x = 0.0, y = 0.0;
        bool operator==(const Point2 &) const = default;
    };

    struct Path
    {
        Point2 location;   // scatterer location, equal to the UE location for the LoS path
        cdouble gain;      // complex path gain
        bool operator==(const Path &) const = default;
    };

    struct UserEquipment
    {
        Point2 location;
        double power_dbm = 10.0;
        std::vector<Path> paths;
        bool operator==(const UserEquipment &) const = default;
    };

    // Multi-user multipath scene; immutable after generation
    struct Scene
    {
        std::vector<UserEquipment> ues;
        double noise_power_dbm = -104.0;
        std::uint64_t seed = 0;

        std::size_t size() const { return ues.size(); }
        double noise_power() const { return dbm_to_watt(noise_power_dbm); }

        // Normalized transmit powers P_k / sigma^2
        std::vector<double> snr() const
        {
            std::vector<double> p;
            p.reserve(ues.size());
            for (const auto &ue : ues)
                p.push_back(dbm_to_watt(ue.power_dbm) / noise_power());
            return p;
        }

        bool operator==(const Scene &) const = default;
    };

    // Near-field response of the given pixels to a source at q: entry n is (r / r_n) exp(-j 2pi/lambda (r_n - r)),
    // r = |q| and r_n = |q - w_n|
    inline CVector array_response_near(const AntennaGrid &grid, const std::vector<int> &pixels, Point2 q)
    {
        const double k0 = 2.0 * std::numbers::pi / grid.wavelength();
        const double r = std::hypot(q.x, q.y);
        CVector a(Eigen::Index(pixels.size()));
        for (std::size_t n = 0; n < pixels.size(); ++n)
        {
            const double rn = std::hypot(q.x, q.y - grid.position(pixels[n]));
            if (rn <= 1e-12 * grid.pitch())
                throw std::domain_error("array_response_near: source coincides with pixel " + std::to_string(pixels[n]));
            a[Eigen::Index(n)] = (r / rn) * std::polar(1.0, -k0 * (rn - r));
        }
        return a;
    }

    inline CVector array_response_near(const AntennaGrid &grid, const Codeword &cw, Point2 q)
    {
        return array_response_near(grid, cw.pixels, q);
    }

    // Location of a source at distance r and angle theta [deg] from broadside. The angle is counted
    // towards negative y, which is the orientation under which the near-field phase -(2pi/lambda)(r_n - r)
    // tends to the far-field phase -(2pi/lambda) y_n sin(theta).
    inline Point2 point_at(double range, double theta_deg)
    {
        return {range * std::cos(deg_to_rad(theta_deg)), -range * std::sin(deg_to_rad(theta_deg))};
    }

    // Far-field steering vector, entries exp(-j 2pi/lambda y_n sin(theta)), theta in degrees from broadside
    inline CVector steering_far(const AntennaGrid &grid, const std::vector<int> &pixels, double theta_deg)
    {
        const double k0 = 2.0 * std::numbers::pi / grid.wavelength();
        const double s = std::sin(deg_to_rad(theta_deg));
        CVector a(Eigen::Index(pixels.size()));
        for (std::size_t n = 0; n < pixels.size(); ++n)
            a[Eigen::Index(n)] = std::polar(1.0, -k0 * grid.position(pixels[n]) * s);
        return a;
    }

    inline CVector steering_far(const AntennaGrid &grid, const Codeword &cw, double theta_deg)
    {
        return steering_far(grid, cw.pixels, theta_deg);
    }

    // Channel of UE k: gain-weighted sum of the per-path near-field responses
    inline CVector channel(const AntennaGrid &grid, const std::vector<int> &pixels, const Scene &scene, std::size_t k)
    {
        if (k >= scene.ues.size())
            throw std::out_of_range("channel: UE index " + std::to_string(k) + " out of range");
        CVector h = CVector::Zero(Eigen::Index(pixels.size()));
        for (const auto &p : scene.ues[k].paths)
            h += p.gain * array_response_near(grid, pixels, p.location);
        return h;
    }

    inline CVector channel(const AntennaGrid &grid, const Codeword &cw, const Scene &scene, std::size_t k)
    {
        return channel(grid, cw.pixels, scene, k);
    }

    // N x K channel matrix [h_1, ..., h_K]
    inline CMatrix channel_matrix(const AntennaGrid &grid, const std::vector<int> &pixels, const Scene &scene)
    {
        CMatrix H(Eigen::Index(pixels.size()), Eigen::Index(scene.size()));
        for (std::size_t k = 0; k < scene.size(); ++k)
            H.col(Eigen::Index(k)) = channel(grid, pixels, scene, k);
        return H;
    }

    // M x K channel of every pixel. Responses are referenced to the origin, so the channel
    // of any codeword is a row selection of this matrix.
    inline CMatrix grid_channel_matrix(const AntennaGrid &grid, const Scene &scene)
    {
        std::vector<int> all(std::size_t(grid.pixels()));
        for (int m = 1; m <= grid.pixels(); ++m)
            all[std::size_t(m - 1)] = m;
        return channel_matrix(grid, all, scene);
    }

    inline CMatrix select_rows(const CMatrix &full, const std::vector<int> &pixels)
    {
        CMatrix H(Eigen::Index(pixels.size()), full.cols());
        for (std::size_t n = 0; n < pixels.size(); ++n)
            H.row(Eigen::Index(n)) = full.row(Eigen::Index(pixels[n] - 1));
        return H;
    }

    struct SceneParams
    {
        int users = 10;
        Point2 center{200.0, 0.0};
        double radius = 50.0;
        int paths = 3;               // L_k, the first path is line of sight
        double scatter_range_max = 200.0; // scatterer distance drawn in (0, max] m
        double theta_min_deg = -90.0;
        double theta_max_deg = 90.0;
        double power_dbm = 10.0;
        double noise_power_dbm = thermal_noise_dbm(10e6);
    };

    // Free-space gain lambda / (4 pi r) with uniform random phase
    inline cdouble path_gain(double wavelength, double distance, RandomStream &rng)
    {
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        return std::polar(wavelength / (4.0 * std::numbers::pi * distance), phase);
    }

    inline Scene generate_scene(const AntennaGrid &grid, std::uint64_t seed, const SceneParams &p = {})
    {
        if (p.users < 0)
            throw std::invalid_argument("generate_scene: user count must be non-negative");
        if (p.paths < 1)
            throw std::invalid_argument("generate_scene: at least one path per UE is required");
        if (!(p.radius >= 0.0) || !(p.scatter_range_max > 0.0))
            throw std::invalid_argument("generate_scene: radius and scatterer range must be positive");
        if (!(p.theta_min_deg >= -90.0 && p.theta_max_deg <= 90.0 && p.theta_min_deg <= p.theta_max_deg))
            throw std::invalid_argument("generate_scene: angle range must lie in [-90, 90] degrees");

        RandomStream rng(seed, "scene");
        Scene s;
        s.seed = seed;
        s.noise_power_dbm = p.noise_power_dbm;
        for (int k = 0; k < p.users; ++k)
        {
            UserEquipment ue;
            ue.power_dbm = p.power_dbm;
            const double rho = p.radius * std::sqrt(rng.uniform());
            const double psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            ue.location = {p.center.x + rho * std::cos(psi), p.center.y + rho * std::sin(psi)};

            for (int l = 0; l < p.paths; ++l)
            {
                Point2 q = ue.location;
                if (l > 0)
                {
                    const double r = p.scatter_range_max * (1.0 - rng.uniform());
                    q = point_at(r, rng.uniform(p.theta_min_deg, p.theta_max_deg));
                }
                const double dist = std::hypot(q.x, q.y);
                ue.paths.push_back({q, path_gain(grid.wavelength(), dist, rng)});
            }
            s.ues.push_back(std::move(ue));
        }
        return s;
    }

    // Key-value scene file:
    //   seed = <int>
    //   noise_power_dbm = <real>
    //   ue_count = <int>
    //   ue.<k>.location = <x> <y>
    //   ue.<k>.power_dbm = <real>
    //   ue.<k>.path_count = <int>
    //   ue.<k>.path.<l>.location = <x> <y>
    //   ue.<k>.path.<l>.gain = <re> <im>
    inline void save_scene(std::ostream &os, const Scene &s)
    {
        std::ostringstream o;
        o.imbue(std::locale::classic());
        o.precision(std::numeric_limits<double>::max_digits10);
        o << "# flexarray scene\n";
        o << "seed = " << s.seed << '\n';
        o << "noise_power_dbm = " << s.noise_power_dbm << '\n';
        o << "ue_count = " << s.ues.size() << '\n';
        for (std::size_t k = 0; k < s.ues.size(); ++k)
        {
            const auto &ue = s.ues[k];
            const std::string pre = "ue." + std::to_string(k) + ".";
            o << pre << "location = " << ue.location.x << ' ' << ue.location.y << '\n';
            o << pre << "power_dbm = " << ue.power_dbm << '\n';
            o << pre << "path_count = " << ue.paths.size() << '\n';
            for (std::size_t l = 0; l < ue.paths.size(); ++l)
            {
                const std::string pp = pre + "path." + std::to_string(l) + ".";
                o << pp << "location = " << ue.paths[l].location.x << ' ' << ue.paths[l].location.y << '\n';
                o << pp << "gain = " << ue.paths[l].gain.real() << ' ' << ue.paths[l].gain.imag() << '\n';
            }
        }
        os << o.str();
    }

    inline Scene load_scene(std::istream &is)
    {
        std::map<std::string, std::string> kv;
        std::string line;
        while (std::getline(is, line))
        {
            if (line.empty() || line[0] == '#')
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("scene file: missing '=' in line '" + line + "'");
            auto trim = [](std::string t)
            {
                const auto b = t.find_first_not_of(" \t\r");
                const auto e = t.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
            };
            kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }

        auto get = [&](const std::string &key) -> std::istringstream
        {
            auto it = kv.find(key);
            if (it == kv.end())
                throw std::invalid_argument("scene file: missing key '" + key + "'");
            std::istringstream v(it->second);
            v.imbue(std::locale::classic());
            return v;
        };
        auto fail = [](const std::string &key)
        { throw std::invalid_argument("scene file: malformed value for '" + key + "'"); };

        Scene s;
        std::size_t count = 0;
        if (!(get("seed") >> s.seed))
            fail("seed");
        if (!(get("noise_power_dbm") >> s.noise_power_dbm))
            fail("noise_power_dbm");
        if (!(get("ue_count") >> count))
            fail("ue_count");
        for (std::size_t k = 0; k < count; ++k)
        {
            UserEquipment ue;
            const std::string pre = "ue." + std::to_string(k) + ".";
            std::size_t paths = 0;
            if (!(get(pre + "location") >> ue.location.x >> ue.location.y))
                fail(pre + "location");
            if (!(get(pre + "power_dbm") >> ue.power_dbm))
                fail(pre + "power_dbm");
            if (!(get(pre + "path_count") >> paths))
                fail(pre + "path_count");
            for (std::size_t l = 0; l < paths; ++l)
            {
                const std::string pp = pre + "path." + std::to_string(l) + ".";
                Path p;
                double re = 0, im = 0;
                if (!(get(pp + "location") >> p.location.x >> p.location.y))
                    fail(pp + "location");
                if (!(get(pp + "gain") >> re >> im))
                    fail(pp + "gain");
                p.gain = {re, im};
                ue.paths.push_back(p);
            }
            s.ues.push_back(std::move(ue));
        }
        return s;
    }

    // Far-field sources for AoA estimation
    struct LocalizationScene
    {
        std::vector<double> angles_deg;     // theta_k, distinct, in (-90, 90)
        std::vector<double> source_powers;  // Upsilon_k [W]
        int snapshots = 1000;               // J
        double noise_power = 1.0;           // sigma^2 [W]
        std::uint64_t seed = 0;

        std::size_t size() const { return angles_deg.size(); }
    };

    // Evenly spaced angles in [lo, hi] including both ends; a single source sits at the midpoint
    inline std::vector<double> spread_angles(int count, double lo_deg, double hi_deg)
    {
        std::vector<double> th;
        if (count == 1)
            th.push_back(0.5 * (lo_deg + hi_deg));
        for (int i = 0; i < count && count > 1; ++i)
            th.push_back(lo_deg + (hi_deg - lo_deg) * double(i) / double(count - 1));
        return th;
    }

    // Equal-power sources at SNR Upsilon / sigma^2 = snr_db with unit noise power
    inline LocalizationScene make_localization_scene(int sources, double snr_db, int snapshots, std::uint64_t seed,
                                                     double lo_deg = -45.0, double hi_deg = 45.0)
    {
        if (sources < 1)
            throw std::invalid_argument("make_localization_scene: at least one source is required");
        if (snapshots < 1)
            throw std::invalid_argument("make_localization_scene: snapshot count must be positive");
        if (!(lo_deg > -90.0 && hi_deg < 90.0 && lo_deg < hi_deg))
            throw std::invalid_argument("make_localization_scene: angle range must lie inside (-90, 90)");
        LocalizationScene s;
        s.angles_deg = spread_angles(sources, lo_deg, hi_deg);
        s.source_powers.assign(std::size_t(sources), std::pow(10.0, 0.1 * snr_db));
        s.snapshots = snapshots;
        s.noise_power = 1.0;
        s.seed = seed;
        return s;
    }
}

#endif
