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

// Acceptance suite. Each criterion prints one PASS/FAIL line and returns nonzero on failure.
// Usage: flexarray_acceptance [--criterion NAME]   (all criteria when omitted)

#include "flexarray/flexarray.hpp"
#include "oracles.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace flexarray;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

    std::string fmt(const std::vector<double> &v)
    {
        std::ostringstream o;
        o << std::setprecision(4) << '[';
        for (std::size_t i = 0; i < v.size(); ++i)
            o << (i ? " " : "") << v[i];
        o << ']';
        return o.str();
    }

    CMatrix random_channels(std::mt19937_64 &rng, int N, int K)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        CMatrix H(N, K);
        for (int i = 0; i < N; ++i)
            for (int k = 0; k < K; ++k)
                H(i, k) = {n(rng), n(rng)};
        return H;
    }

    std::vector<double> random_powers(std::mt19937_64 &rng, int K)
    {
        std::uniform_real_distribution<double> u(1.0, 100.0);
        std::vector<double> p;
        for (int k = 0; k < K; ++k)
            p.push_back(u(rng));
        return p;
    }

    const AntennaGrid full_grid = AntennaGrid::half_wavelength(256, 3.5e9);
    const AntennaGrid desk_grid = AntennaGrid::half_wavelength(64, 3.5e9);

    Outcome codebook_counts()
    {
        auto acc = build_acc(full_grid, 32, 8);
        const std::size_t expect[] = {225, 707, 3504, 1870, 655};
        std::ostringstream o;
        bool ok = acc.size() == 6961;
        for (Arch a : all_archs)
        {
            ok = ok && acc.count(a) == expect[arch_slot(a)];
            o << arch_name(a) << '=' << acc.count(a) << ' ';
        }
        o << "total=" << acc.size() << " (expected 225/707/3504/1870/655, 6961)";
        return {ok, o.str()};
    }

    Outcome stage1_overhead()
    {
        auto s1 = build_stage1_codebooks(full_grid, 32, 8);
        const std::size_t expect[] = {8, 12, 185, 148, 132};
        std::ostringstream o;
        bool ok = true;
        for (Arch a : all_archs)
        {
            ok = ok && s1.at(a).size() == expect[arch_slot(a)];
            o << arch_name(a) << '=' << s1.at(a).size() << ' ';
        }
        const long worst = worst_case_two_stage_overhead(full_grid, 32, 8);
        const std::size_t usa16 = build_stage1_codebook(full_grid, Arch::USA, 16, 4).size();
        ok = ok && worst == 1120 && usa16 == 35;
        o << "worst=" << worst << " USA(N=16)=" << usa16 << " (expected 8/12/185/148/132, 1120, 35)";
        return {ok, o.str()};
    }

    Outcome greedy_counts()
    {
        bool ok = true;
        std::ostringstream o;
        for (auto [N, expect] : {std::pair{32, 7696L}, std::pair{16, 3976L}})
        {
            auto scene = generate_scene(full_grid, 1);
            auto g = greedy_as(full_grid, N, scene);
            ok = ok && g.computations == expect && greedy_computation_count(256, N) == expect;
            o << "N=" << N << ": " << g.computations << " (expected " << expect << ") ";
        }
        return {ok, o.str()};
    }

    Outcome proposition1()
    {
        long cases = 0, bad = 0;
        for (int N = 3; N <= 64; ++N)
            for (int M = N; M <= 512; ++M)
            {
                std::vector<int> brute;
                for (int nin = 1; nin <= N - 2; ++nin)
                    if (long(N - nin) * (nin + 1) <= M)
                        brute.push_back(nin);
                ++cases;
                if (feasible_na_set(M, N) != brute)
                    ++bad;
            }
        return {bad == 0, std::to_string(cases) + " (M, N) pairs, " + std::to_string(bad) + " mismatches"};
    }

    Outcome proposition2()
    {
        std::mt19937_64 rng(2024);
        const int M = 64, N = 8;
        double worst = 0.0;
        long checks = 0;
        for (int inst = 0; inst < 200; ++inst)
        {
            const int K = std::array{2, 4, 8}[std::size_t(inst % 3)];
            auto full = random_channels(rng, M, K);
            auto p = random_powers(rng, K);
            std::vector<GreedyUserState> st;
            for (int k = 0; k < K; ++k)
            {
                std::vector<double> others;
                for (int i = 0; i < K; ++i)
                    if (i != k)
                        others.push_back(p[std::size_t(i)]);
                st.emplace_back(p[std::size_t(k)], others);
            }
            std::vector<int> chosen;
            std::vector<bool> taken(M, false);
            for (int n = 1; n <= N; ++n)
            {
                int best = 0;
                double best_rate = -1.0;
                for (int m = 1; m <= M; ++m)
                {
                    if (taken[std::size_t(m - 1)])
                        continue;
                    auto trial = chosen;
                    trial.push_back(m);
                    auto direct = oracle::sinr_inverse(select_rows(full, trial), p);
                    double rate = 0.0;
                    for (int k = 0; k < K; ++k)
                    {
                        const double inc = st[std::size_t(k)].incremental_sinr(full(m - 1, k), interferer_column(full, m, k));
                        worst = std::max(worst, rel(inc, direct[std::size_t(k)]));
                        ++checks;
                        rate += std::log2(1.0 + inc);
                    }
                    if (best == 0 || strictly_better(rate, best_rate))
                        best = m, best_rate = rate;
                }
                for (int k = 0; k < K; ++k)
                    st[std::size_t(k)].commit(full(best - 1, k), interferer_column(full, best, k));
                chosen.push_back(best);
                taken[std::size_t(best - 1)] = true;
            }
        }
        std::ostringstream o;
        o << checks << " incremental SINRs, worst relative error " << std::scientific << std::setprecision(2) << worst;
        return {worst <= 1e-9, o.str()};
    }

    Outcome woodbury()
    {
        std::mt19937_64 rng(99);
        double worst = 0.0;
        for (int inst = 0; inst < 1000; ++inst)
        {
            const int N = 1 + int(rng() % 16), K = 1 + int(rng() % 12);
            auto H = random_channels(rng, N, K);
            auto p = random_powers(rng, K);
            auto d = sinr_direct(H, p);
            auto w = sinr_woodbury(H, p);
            for (int k = 0; k < K; ++k)
                worst = std::max(worst, rel(d.sinr[std::size_t(k)], w.sinr[std::size_t(k)]));
        }
        std::ostringstream o;
        o << "1000 instances, worst relative gap " << std::scientific << std::setprecision(2) << worst;
        return {worst <= 1e-9, o.str()};
    }

    Outcome two_stage_quality()
    {
        auto acc = build_acc(desk_grid, 8, 4);
        SceneParams sp;
        sp.users = 4;
        std::vector<double> ratio;
        bool dominated = true;
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            auto scene = generate_scene(desk_grid, seed, sp);
            SumRateUtility u(desk_grid, scene);
            auto ex = exhaustive_scan(acc, u);
            auto ts = two_stage_scan(desk_grid, 8, 4, u);
            ratio.push_back(ts.best_utility / ex.best_utility);
            dominated = dominated && ts.best_utility <= ex.best_utility;
        }
        const double med = median(ratio);
        std::ostringstream o;
        o << "median ratio " << std::setprecision(4) << med << ", min " << *std::min_element(ratio.begin(), ratio.end())
          << ", two-stage <= exhaustive on every seed: " << (dominated ? "yes" : "no");
        return {med >= 0.95 && dominated, o.str()};
    }

    Outcome grating_lobe()
    {
        auto usa = codeword_usa(desk_grid, 8, 2, 1);
        LocalizationScene s{{30.0}, {10.0}, 1000, 1.0, 5};
        auto R = sample_covariance(snapshots(desk_grid, usa, s));
        const double ratio = desk_grid.pitch() / desk_grid.wavelength();
        auto pm = bartlett_spectrum(R, usa.pixels, ratio, {-30.0, 30.0});
        const double pair_gap = rel(pm[0], pm[1]);

        auto angles = AngleGrid{}.angles();
        auto P = bartlett_spectrum(R, usa.pixels, ratio, angles);
        auto pk = estimate_aoas(angles, P, 2);
        double peak_gap = 1.0;
        if (pk.angles_deg.size() == 2)
        {
            auto at = [&](double t) { return bartlett_spectrum(R, usa.pixels, ratio, {t})[0]; };
            peak_gap = rel(at(pk.angles_deg[0]), at(pk.angles_deg[1]));
        }
        std::ostringstream o;
        o << std::scientific << std::setprecision(2) << "|P(30)-P(-30)|/P = " << pair_gap << ", top peaks at "
          << fmt(pk.angles_deg) << " differ by " << peak_gap;
        return {pair_gap <= 1e-9 && peak_gap < 1e-6, o.str()};
    }

    Outcome coarray_dof()
    {
        auto na = codeword_na(desk_grid, 8, 4, 1);
        auto ca = codeword_ca(desk_grid, 8, 1);
        auto angles = AngleGrid{}.angles();
        std::vector<double> na_rmse;
        int ca_deficit = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            auto scene = make_localization_scene(12, 0.0, 1000, seed);
            auto field = draw_snapshot_field(desk_grid, scene);
            auto Rn = sample_covariance(snapshots(desk_grid, na.pixels, scene, field));
            auto sn = localize(desk_grid, na.pixels, Rn, 12, SpectrumMode::CoArray, angles);
            na_rmse.push_back(rmse_deg(scene.angles_deg, sn.estimates_deg));
            auto Rc = sample_covariance(snapshots(desk_grid, ca.pixels, scene, field));
            ca_deficit += localize(desk_grid, ca.pixels, Rc, 12, SpectrumMode::CoArray, angles).deficit ? 1 : 0;
        }
        const double med = median(na_rmse);
        std::ostringstream o;
        o << "NA median RMSE " << std::setprecision(4) << med << " deg, CA deficit-flagged on " << ca_deficit << "/20 seeds";
        return {med < 1.0 && ca_deficit == 20, o.str()};
    }

    // Two sources at +-30 deg: their steering vectors are orthogonal on an 8-pixel CA, so the
    // Bartlett peaks carry no two-source bias and the high-SNR limit is the grid itself.
    Outcome rmse_vs_snr()
    {
        const std::vector<double> snrs{-20, -15, -10, -5, 0};
        const std::vector<Arch> archs{Arch::CA, Arch::MoA, Arch::NA, Arch::CPA};
        std::map<Arch, std::vector<double>> med;
        for (Arch a : archs)
            for (double snr : snrs)
            {
                std::vector<double> r;
                for (std::uint64_t seed = 1; seed <= 20; ++seed)
                {
                    auto scene = make_localization_scene(2, snr, 1000, seed, -30.0, 30.0);
                    auto res = localization_training(desk_grid, 8, 4, scene, SpectrumMode::Physical,
                                                     TrainingScheme::TwoStage, {a});
                    r.push_back(-res.best_utility);
                }
                med[a].push_back(median(r));
            }
        bool ok = true;
        std::ostringstream o;
        for (Arch a : archs)
        {
            for (std::size_t i = 1; i < snrs.size(); ++i)
                ok = ok && med[a][i] <= med[a][i - 1];
            o << arch_name(a) << fmt(med[a]) << ' ';
        }
        for (std::size_t i = 0; i < snrs.size(); ++i)
            ok = ok && med[Arch::NA][i] <= med[Arch::CA][i];
        o << "(median RMSE deg at SNR -20..0 dB)";
        return {ok, o.str()};
    }

    Outcome sum_rate_vs_k()
    {
        const std::vector<int> Ks{2, 4, 8, 16};
        std::vector<double> greedy_med, ts_med;
        for (int K : Ks)
        {
            SceneParams sp;
            sp.users = K;
            std::vector<double> g, t;
            for (std::uint64_t seed = 1; seed <= 20; ++seed)
            {
                auto scene = generate_scene(desk_grid, seed, sp);
                SumRateUtility u(desk_grid, scene);
                g.push_back(greedy_as(u.grid_channels(), u.snr(), 8).sum_rate);
                t.push_back(two_stage_scan(desk_grid, 8, 4, u).best_utility);
            }
            greedy_med.push_back(median(g));
            ts_med.push_back(median(t));
        }
        bool ok = true;
        for (std::size_t i = 1; i < Ks.size(); ++i)
            ok = ok && greedy_med[i] <= greedy_med[i - 1] && ts_med[i] <= ts_med[i - 1];
        return {ok, "median sum rate at K=2,4,8,16: greedy " + fmt(greedy_med) + " two-stage " + fmt(ts_med)};
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"codebook_counts", codebook_counts},
        {"stage1_overhead", stage1_overhead},
        {"greedy_counts", greedy_counts},
        {"proposition1", proposition1},
        {"proposition2", proposition2},
        {"woodbury", woodbury},
        {"two_stage_quality", two_stage_quality},
        {"grating_lobe", grating_lobe},
        {"coarray_dof", coarray_dof},
        {"rmse_vs_snr", rmse_vs_snr},
        {"sum_rate_vs_k", sum_rate_vs_k},
    };
}

int main(int argc, char **argv)
{
    std::string only;
    for (int i = 1; i < argc; ++i)
    {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc)
            only = argv[++i];
        else if (a == "--list")
        {
            for (const auto &c : criteria)
                std::cout << c.first << '\n';
            return 0;
        }
        else
        {
            std::cerr << "usage: flexarray_acceptance [--criterion NAME] [--list]\n";
            return 2;
        }
    }

    int failed = 0, run = 0;
    for (const auto &[name, fn] : criteria)
    {
        if (!only.empty() && name != only)
            continue;
        ++run;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try
        {
            r = fn();
        }
        catch (const std::exception &e)
        {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << " [" << std::fixed
                  << std::setprecision(2) << sec << " s]" << std::defaultfloat << std::endl;
        failed += r.pass ? 0 : 1;
    }
    if (run == 0)
    {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return failed == 0 ? 0 : 1;
}
