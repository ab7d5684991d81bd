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

#ifndef FLEXARRAY_LOCALIZATION_HPP
#define FLEXARRAY_LOCALIZATION_HPP

#include "channel.hpp"
#include "csv.hpp"
#include "scan.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace flexarray
{
    enum class SpectrumMode
    {
        Physical, // R(w) with the codeword's own steering vectors
        CoArray   // spatially smoothed co-array covariance with a virtual contiguous ULA
    };

    inline std::string_view mode_name(SpectrumMode m) { return m == SpectrumMode::Physical ? "physical" : "coarray"; }

    inline SpectrumMode parse_mode(std::string_view s)
    {
        if (s == "physical")
            return SpectrumMode::Physical;
        if (s == "coarray")
            return SpectrumMode::CoArray;
        throw std::invalid_argument("unknown spectrum mode '" + std::string(s) + "'");
    }

    // Uniform search grid in degrees; both ends are included exactly
    struct AngleGrid
    {
        double lo_deg = -90.0;
        double hi_deg = 90.0;
        double step_deg = 0.1;

        std::vector<double> angles() const
        {
            if (!(step_deg > 0.0) || !(lo_deg < hi_deg) || lo_deg < -90.0 || hi_deg > 90.0)
                throw std::invalid_argument("AngleGrid: need -90 <= lo < hi <= 90 and a positive step");
            const long count = std::lround((hi_deg - lo_deg) / step_deg) + 1;
            std::vector<double> th(static_cast<std::size_t>(count));
            for (long i = 0; i < count; ++i)
                th[std::size_t(i)] = lo_deg + (hi_deg - lo_deg) * double(i) / double(count - 1);
            return th;
        }
    };

    // Source symbols (K x J, row k scaled to power Upsilon_k) and noise of every grid pixel (M x J).
    // Drawing the noise for the whole grid lets all codewords of one trial share the same realization.
    struct SnapshotField
    {
        CMatrix symbols;
        CMatrix noise;
    };

    inline SnapshotField draw_snapshot_field(const AntennaGrid &grid, const LocalizationScene &s)
    {
        if (s.snapshots < 1)
            throw std::invalid_argument("draw_snapshot_field: snapshot count must be positive");
        if (s.source_powers.size() != s.angles_deg.size())
            throw std::invalid_argument("draw_snapshot_field: one power per source is required");
        const Eigen::Index K = Eigen::Index(s.size()), J = s.snapshots, M = grid.pixels();
        SnapshotField f{CMatrix(K, J), CMatrix(M, J)};

        RandomStream sym(s.seed, "snapshots");
        for (Eigen::Index j = 0; j < J; ++j)
            for (Eigen::Index k = 0; k < K; ++k)
                f.symbols(k, j) = sym.complex_normal(s.source_powers[std::size_t(k)]);

        RandomStream noise(s.seed, "noise");
        for (Eigen::Index j = 0; j < J; ++j)
            for (Eigen::Index m = 0; m < M; ++m)
                f.noise(m, j) = noise.complex_normal(s.noise_power);
        return f;
    }

    // N x K far-field steering matrix A(w)
    inline CMatrix steering_matrix(const AntennaGrid &grid, const std::vector<int> &pixels, const std::vector<double> &angles_deg)
    {
        CMatrix A(Eigen::Index(pixels.size()), Eigen::Index(angles_deg.size()));
        for (std::size_t k = 0; k < angles_deg.size(); ++k)
            A.col(Eigen::Index(k)) = steering_far(grid, pixels, angles_deg[k]);
        return A;
    }

    // Received snapshots Y = A(w) E + N restricted to the codeword's pixels
    inline CMatrix snapshots(const AntennaGrid &grid, const std::vector<int> &pixels, const LocalizationScene &s,
                             const SnapshotField &f)
    {
        return steering_matrix(grid, pixels, s.angles_deg) * f.symbols + select_rows(f.noise, pixels);
    }

    inline CMatrix snapshots(const AntennaGrid &grid, const Codeword &cw, const LocalizationScene &s)
    {
        return snapshots(grid, cw.pixels, s, draw_snapshot_field(grid, s));
    }

    // R = Y Y^H / J, Hermitian by construction
    inline CMatrix sample_covariance(const CMatrix &Y)
    {
        if (Y.cols() < 1)
            throw std::invalid_argument("sample_covariance: at least one snapshot is required");
        CMatrix R = (Y * Y.adjoint()) / double(Y.cols());
        CMatrix H = 0.5 * (R + R.adjoint());
        return H;
    }

    inline bool is_hermitian(const CMatrix &R, double tol = 1e-10)
    {
        if (R.rows() != R.cols())
            return false;
        return (R - R.adjoint()).norm() <= tol * std::max(1.0, R.norm());
    }

    // Difference co-array of a pixel set in units of the pitch
    struct CoArray
    {
        std::vector<int> lags;  // sorted distinct differences, symmetric around 0
        int contiguous = 0;     // L: lags -(L-1)..(L-1) are all present
        int virtual_aperture = 0;

        std::vector<int> contiguous_segment() const
        {
            std::vector<int> s;
            for (int l = -(contiguous - 1); l <= contiguous - 1; ++l)
                s.push_back(l);
            return s;
        }
    };

    inline CoArray coarray_of(const std::vector<int> &pixels)
    {
        std::set<int> d;
        for (int a : pixels)
            for (int b : pixels)
                d.insert(a - b);
        CoArray c;
        c.lags.assign(d.begin(), d.end());
        while (d.count(c.contiguous))
            ++c.contiguous;
        c.virtual_aperture = c.lags.empty() ? 0 : c.lags.back();
        return c;
    }

    inline CoArray coarray_of(const Codeword &cw) { return coarray_of(cw.pixels); }

    // Averages the entries of vec(R) that share a lag; returns x[l] for l = -(L-1)..(L-1) at index l + L - 1
    inline CVector lag_vector(const CMatrix &R, const std::vector<int> &pixels)
    {
        if (R.rows() != Eigen::Index(pixels.size()) || R.cols() != R.rows())
            throw std::invalid_argument("lag_vector: covariance size does not match the codeword");
        const int L = coarray_of(pixels).contiguous;
        std::map<int, std::pair<cdouble, int>> acc;
        for (std::size_t m = 0; m < pixels.size(); ++m)
            for (std::size_t n = 0; n < pixels.size(); ++n)
            {
                auto &e = acc[pixels[m] - pixels[n]];
                e.first += R(Eigen::Index(m), Eigen::Index(n));
                e.second += 1;
            }
        CVector x(2 * L - 1);
        for (int l = -(L - 1); l <= L - 1; ++l)
        {
            const auto &e = acc.at(l);
            x[l + L - 1] = e.first / double(e.second);
        }
        return x;
    }

    // L x L spatially smoothed covariance: (1/L) sum_i z_i z_i^H with z_i = [x(-i), ..., x(L-1-i)]
    inline CMatrix coarray_covariance(const CMatrix &R, const std::vector<int> &pixels)
    {
        if (!is_hermitian(R))
            throw std::invalid_argument("coarray_covariance: covariance is not Hermitian");
        const int L = coarray_of(pixels).contiguous;
        if (L < 2)
            throw std::invalid_argument("coarray_covariance: contiguous co-array segment too short (L = " +
                                        std::to_string(L) + ")");
        const CVector x = lag_vector(R, pixels);
        CMatrix Rs = CMatrix::Zero(L, L);
        for (int i = 0; i < L; ++i)
        {
            const CVector z = x.segment(L - 1 - i, L);
            Rs.noalias() += z * z.adjoint();
        }
        Rs /= double(L);
        return 0.5 * (Rs + Rs.adjoint());
    }

    // Bartlett spectrum a^H R a over the angle grid for steering vectors on integer positions
    // `geometry` (units of the pitch). Entries with equal position difference are summed first,
    // so each angle costs one pass over the distinct lags.
    inline std::vector<double> bartlett_spectrum(const CMatrix &R, const std::vector<int> &geometry,
                                                 double pitch_over_lambda, const std::vector<double> &angles_deg)
    {
        if (R.rows() != Eigen::Index(geometry.size()) || R.cols() != R.rows())
            throw std::invalid_argument("bartlett_spectrum: covariance size does not match the geometry");
        if (!is_hermitian(R))
            throw std::invalid_argument("bartlett_spectrum: covariance is not Hermitian");
        for (double t : angles_deg)
            if (t < -90.0 || t > 90.0)
                throw std::invalid_argument("bartlett_spectrum: search angles must lie in [-90, 90] degrees");

        std::map<int, cdouble> c;
        double c0 = 0.0;
        for (std::size_t m = 0; m < geometry.size(); ++m)
            for (std::size_t n = 0; n < geometry.size(); ++n)
            {
                const int l = geometry[m] - geometry[n];
                if (l == 0)
                    c0 += R(Eigen::Index(m), Eigen::Index(n)).real();
                else if (l > 0)
                    c[l] += R(Eigen::Index(m), Eigen::Index(n));
            }

        const double kd = 2.0 * std::numbers::pi * pitch_over_lambda;
        std::vector<double> P;
        P.reserve(angles_deg.size());
        for (double t : angles_deg)
        {
            const double u = kd * std::sin(deg_to_rad(t));
            double v = c0;
            for (const auto &[l, cl] : c)
                v += 2.0 * (cl * std::polar(1.0, u * double(l))).real();
            P.push_back(std::max(0.0, v));
        }
        return P;
    }

    struct SpectrumResult
    {
        std::vector<double> angles_deg;
        std::vector<double> power;
        std::vector<double> estimates_deg;
        bool deficit = false;
        SpectrumMode mode = SpectrumMode::CoArray;
    };

    struct AoaEstimate
    {
        std::vector<double> angles_deg; // ascending
        bool deficit = false;           // fewer than K strict local maxima
    };

    // K largest strict local maxima, interior points only
    inline AoaEstimate estimate_aoas(const std::vector<double> &angles_deg, const std::vector<double> &power, int sources)
    {
        if (sources < 1)
            throw std::invalid_argument("estimate_aoas: at least one source is required");
        if (angles_deg.size() != power.size())
            throw std::invalid_argument("estimate_aoas: angle and spectrum sizes differ");
        std::vector<std::size_t> peaks;
        for (std::size_t i = 1; i + 1 < power.size(); ++i)
            if (power[i] > power[i - 1] && power[i] > power[i + 1])
                peaks.push_back(i);
        std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return power[a] > power[b]; });

        AoaEstimate e;
        e.deficit = peaks.size() < std::size_t(sources);
        if (!e.deficit)
            peaks.resize(std::size_t(sources));
        for (std::size_t i : peaks)
            e.angles_deg.push_back(angles_deg[i]);
        std::sort(e.angles_deg.begin(), e.angles_deg.end());
        return e;
    }

    // Error charged for every source without an estimate
    inline constexpr double missing_estimate_penalty_deg = 90.0;

    // Root-mean-square AoA error. Both lists are sorted; with fewer estimates than sources the
    // estimates are assigned to truths in order so that the squared error is smallest, and every
    // unassigned truth costs the 90 degree penalty.
    inline double rmse_deg(std::vector<double> truth, std::vector<double> est)
    {
        if (truth.empty())
            throw std::invalid_argument("rmse_deg: no true angles");
        if (est.size() > truth.size())
            throw std::invalid_argument("rmse_deg: more estimates than sources");
        std::sort(truth.begin(), truth.end());
        std::sort(est.begin(), est.end());
        const std::size_t K = truth.size(), E = est.size();
        const double pen = missing_estimate_penalty_deg * missing_estimate_penalty_deg;

        // cost[i][j]: best cost of the first i truths using the first j estimates
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> cost(K + 1, std::vector<double>(E + 1, inf));
        cost[0][0] = 0.0;
        for (std::size_t i = 1; i <= K; ++i)
            for (std::size_t j = 0; j <= std::min(i, E); ++j)
            {
                double c = cost[i - 1][j] + pen;
                if (j > 0)
                {
                    const double d = truth[i - 1] - est[j - 1];
                    c = std::min(c, cost[i - 1][j - 1] + d * d);
                }
                cost[i][j] = c;
            }
        return std::sqrt(cost[K][E] / double(K));
    }

    // Covariance and steering geometry for one codeword in the given mode
    inline SpectrumResult localize(const AntennaGrid &grid, const std::vector<int> &pixels, const CMatrix &R,
                                   int sources, SpectrumMode mode, const std::vector<double> &angles_deg)
    {
        SpectrumResult res;
        res.mode = mode;
        res.angles_deg = angles_deg;
        const double ratio = grid.pitch() / grid.wavelength();
        if (mode == SpectrumMode::Physical)
            res.power = bartlett_spectrum(R, pixels, ratio, angles_deg);
        else
        {
            const CMatrix Rs = coarray_covariance(R, pixels);
            std::vector<int> ula(static_cast<std::size_t>(Rs.rows()));
            for (std::size_t t = 0; t < ula.size(); ++t)
                ula[t] = int(t);
            res.power = bartlett_spectrum(Rs, ula, ratio, angles_deg);
        }
        auto e = estimate_aoas(angles_deg, res.power, sources);
        res.estimates_deg = e.angles_deg;
        res.deficit = e.deficit;
        return res;
    }

    // RMSE of a codeword for one snapshot realization. Co-array mode on a codeword without a
    // usable contiguous segment (L < 2) yields no estimates, so every source is penalized.
    class RmseUtility
    {
    public:
        RmseUtility(const AntennaGrid &grid, const LocalizationScene &scene, SpectrumMode mode, AngleGrid search = {})
            : grid_(grid), scene_(scene), field_(draw_snapshot_field(grid, scene)), mode_(mode),
              angles_(search.angles())
        {
        }

        double rmse(const Codeword &cw) const
        {
            if (mode_ == SpectrumMode::CoArray && coarray_of(cw.pixels).contiguous < 2)
                return rmse_deg(scene_.angles_deg, {});
            const CMatrix R = sample_covariance(snapshots(grid_, cw.pixels, scene_, field_));
            auto s = localize(grid_, cw.pixels, R, int(scene_.size()), mode_, angles_);
            return rmse_deg(scene_.angles_deg, s.estimates_deg);
        }

        // Utility is the negated RMSE so that larger is better
        double operator()(const Codeword &cw) const { return -rmse(cw); }

        const SnapshotField &field() const { return field_; }

    private:
        AntennaGrid grid_;
        LocalizationScene scene_;
        SnapshotField field_;
        SpectrumMode mode_;
        std::vector<double> angles_;
    };

    enum class TrainingScheme
    {
        Exhaustive,
        TwoStage
    };

    // Codeword minimizing the RMSE over the selected architectures (all by default)
    inline TrainingResult localization_training(const AntennaGrid &grid, int activated, int modules,
                                                const LocalizationScene &scene,
                                                SpectrumMode mode = SpectrumMode::CoArray,
                                                TrainingScheme scheme = TrainingScheme::TwoStage,
                                                const std::vector<Arch> &archs = {all_archs.begin(), all_archs.end()},
                                                AngleGrid search = {})
    {
        const RmseUtility util(grid, scene, mode, search);
        if (scheme == TrainingScheme::TwoStage)
            return two_stage_scan(grid, activated, modules, util, archs);

        std::vector<Codeword> entries;
        for (Arch a : all_archs)
            if (std::find(archs.begin(), archs.end(), a) != archs.end())
            {
                auto part = enumerate_arch(grid, a, activated, modules);
                entries.insert(entries.end(), part.begin(), part.end());
            }
        return exhaustive_scan(Codebook(grid.pixels(), activated, modules, std::move(entries)), util);
    }

    inline void write_spectrum(std::ostream &os, const std::vector<double> &angles_deg, const std::vector<double> &power)
    {
        os << "theta_deg,power\n";
        for (std::size_t i = 0; i < angles_deg.size(); ++i)
        {
            CsvWriter w(os);
            w.field(angles_deg[i]).field(power[i]);
            w.end();
        }
    }

    struct RmseRecord
    {
        std::string scheme;
        std::string arch;
        int phi = 0;
        int ref_index = 0;
        double snr_db = 0.0;
        int sources = 0;
        double rmse_deg = 0.0;
        std::uint64_t seed = 0;
    };

    inline RmseRecord make_rmse_record(const TrainingResult &r, double snr_db, int sources, std::uint64_t seed)
    {
        return {r.scheme, std::string(arch_name(r.best.arch)), r.best.phi, r.best.ref_index, snr_db, sources,
                -r.best_utility, seed};
    }

    inline void write_rmse_header(std::ostream &os) { os << "scheme,arch,phi,ref_index,snr_db,K,rmse_deg,seed\n"; }

    inline void write_rmse_record(std::ostream &os, const RmseRecord &r)
    {
        CsvWriter w(os);
        w.field(r.scheme).field(r.arch).field(r.phi).field(r.ref_index).field(r.snr_db).field(r.sources);
        w.field(r.rmse_deg).field((unsigned long long)r.seed);
        w.end();
    }
}

#endif
