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

#ifndef FLEXARRAY_COMMS_HPP
#define FLEXARRAY_COMMS_HPP

#include "channel.hpp"
#include "csv.hpp"
#include "scan.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace flexarray
{
    enum class SinrMethod
    {
        Automatic, // direct when K - 1 > N, Woodbury otherwise
        Direct,    // N x N inversion of C_k = I + sum_{i != k} P_i h_i h_i^H
        Woodbury   // (K-1) x (K-1) inversion of P_k^-1 + H_k^H H_k
    };

    // Per-UE MMSE SINR, unit-norm receive beamformers and the resulting sum rate
    struct SinrReport
    {
        std::vector<double> sinr;
        std::vector<CVector> beamformers;
        double sum_rate = 0.0;
    };

    namespace detail
    {
        inline CVector unit_or_first(const CVector &v)
        {
            const double n = v.norm();
            if (n > 0.0)
                return v / n;
            CVector e = CVector::Zero(v.size());
            if (e.size() > 0)
                e[0] = 1.0;
            return e;
        }

        inline void check_powers(const CMatrix &H, const std::vector<double> &snr)
        {
            if (std::size_t(H.cols()) != snr.size())
                throw std::invalid_argument("mmse_sinr: " + std::to_string(H.cols()) + " channels but " +
                                            std::to_string(snr.size()) + " powers");
            for (double p : snr)
                if (!(p >= 0.0) || !std::isfinite(p))
                    throw std::invalid_argument("mmse_sinr: normalized powers must be finite and non-negative");
            if (!H.allFinite())
                throw std::invalid_argument("mmse_sinr: channel matrix has non-finite entries");
        }

        // H without column k
        inline CMatrix drop_column(const CMatrix &H, Eigen::Index k)
        {
            CMatrix out(H.rows(), H.cols() - 1);
            for (Eigen::Index i = 0, j = 0; i < H.cols(); ++i)
                if (i != k)
                    out.col(j++) = H.col(i);
            return out;
        }
    }

    inline double sum_rate_of(const std::vector<double> &sinr)
    {
        double r = 0.0;
        for (double g : sinr)
            r += std::log2(1.0 + g);
        return r;
    }

    // gamma_k = P_k h_k^H C_k^-1 h_k with an N x N solve per UE
    inline SinrReport sinr_direct(const CMatrix &H, const std::vector<double> &snr)
    {
        detail::check_powers(H, snr);
        const Eigen::Index N = H.rows(), K = H.cols();
        SinrReport rep;
        for (Eigen::Index k = 0; k < K; ++k)
        {
            CMatrix C = CMatrix::Identity(N, N);
            for (Eigen::Index i = 0; i < K; ++i)
                if (i != k)
                    C.noalias() += snr[std::size_t(i)] * H.col(i) * H.col(i).adjoint();
            Eigen::LLT<CMatrix> llt(C);
            if (llt.info() != Eigen::Success)
                throw std::runtime_error("sinr_direct: interference-plus-noise covariance is not positive definite");
            const CVector x = llt.solve(H.col(k));
            const double g = snr[std::size_t(k)] * std::max(0.0, H.col(k).dot(x).real());
            rep.sinr.push_back(g);
            rep.beamformers.push_back(detail::unit_or_first(x));
        }
        rep.sum_rate = sum_rate_of(rep.sinr);
        return rep;
    }

    // gamma_k = P_k (|h_k|^2 - h_k^H H_k (P_k^-1 + H_k^H H_k)^-1 H_k^H h_k), requires positive powers
    inline SinrReport sinr_woodbury(const CMatrix &H, const std::vector<double> &snr)
    {
        detail::check_powers(H, snr);
        const Eigen::Index K = H.cols();
        SinrReport rep;
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const CVector h = H.col(k);
            if (K == 1)
            {
                rep.sinr.push_back(snr[0] * h.squaredNorm());
                rep.beamformers.push_back(detail::unit_or_first(h));
                continue;
            }
            const CMatrix Hk = detail::drop_column(H, k);
            CMatrix S = Hk.adjoint() * Hk;
            for (Eigen::Index i = 0, j = 0; i < K; ++i)
                if (i != k)
                {
                    const double p = snr[std::size_t(i)];
                    if (!(p > 0.0))
                        throw std::invalid_argument("sinr_woodbury: interferer powers must be positive");
                    S(j, j) += 1.0 / p;
                    ++j;
                }
            Eigen::LDLT<CMatrix> ldlt(S);
            if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14))
                throw std::runtime_error("sinr_woodbury: P_k^-1 + H_k^H H_k is numerically singular");
            const CVector u = Hk.adjoint() * h;
            const CVector t = ldlt.solve(u);
            const double g = snr[std::size_t(k)] * std::max(0.0, h.squaredNorm() - u.dot(t).real());
            rep.sinr.push_back(g);
            rep.beamformers.push_back(detail::unit_or_first(h - Hk * t));
        }
        rep.sum_rate = sum_rate_of(rep.sinr);
        return rep;
    }

    inline SinrReport mmse_sinr(const CMatrix &H, const std::vector<double> &snr,
                                SinrMethod method = SinrMethod::Automatic)
    {
        if (method == SinrMethod::Automatic)
        {
            const bool zero_power = std::any_of(snr.begin(), snr.end(), [](double p) { return !(p > 0.0); });
            method = (H.cols() - 1 > H.rows() || zero_power) ? SinrMethod::Direct : SinrMethod::Woodbury;
        }
        return method == SinrMethod::Direct ? sinr_direct(H, snr) : sinr_woodbury(H, snr);
    }

    inline SinrReport mmse_sinr(const AntennaGrid &grid, const Codeword &cw, const Scene &scene,
                                SinrMethod method = SinrMethod::Automatic)
    {
        return mmse_sinr(channel_matrix(grid, cw.pixels, scene), scene.snr(), method);
    }

    // SINR of UE k for an arbitrary receive beamformer v
    inline double sinr_for_beamformer(const CMatrix &H, const std::vector<double> &snr, Eigen::Index k, const CVector &v)
    {
        detail::check_powers(H, snr);
        if (v.size() != H.rows())
            throw std::invalid_argument("sinr_for_beamformer: beamformer length mismatch");
        double interference = v.squaredNorm();
        for (Eigen::Index i = 0; i < H.cols(); ++i)
            if (i != k)
                interference += snr[std::size_t(i)] * std::norm(v.dot(H.col(i)));
        return snr[std::size_t(k)] * std::norm(v.dot(H.col(k))) / interference;
    }

    inline double sum_rate(const CMatrix &H, const std::vector<double> &snr)
    {
        return mmse_sinr(H, snr).sum_rate;
    }

    inline double sum_rate(const AntennaGrid &grid, const Codeword &cw, const Scene &scene)
    {
        return mmse_sinr(grid, cw, scene).sum_rate;
    }

    // Sum-rate utility over a fixed scene; caches the channel of every pixel
    class SumRateUtility
    {
    public:
        SumRateUtility(const AntennaGrid &grid, const Scene &scene)
            : full_(grid_channel_matrix(grid, scene)), snr_(scene.snr())
        {
        }

        double operator()(const Codeword &cw) const { return sum_rate(select_rows(full_, cw.pixels), snr_); }

        const CMatrix &grid_channels() const { return full_; }
        const std::vector<double> &snr() const { return snr_; }

    private:
        CMatrix full_;
        std::vector<double> snr_;
    };

    inline TrainingResult comm_exhaustive(const AntennaGrid &grid, const Codebook &cb, const Scene &scene)
    {
        return exhaustive_scan(cb, SumRateUtility(grid, scene));
    }

    inline TrainingResult comm_two_stage(const AntennaGrid &grid, int activated, int modules, const Scene &scene)
    {
        return two_stage_scan(grid, activated, modules, SumRateUtility(grid, scene));
    }

    // Incremental SINR state of one UE during greedy selection.
    // Holds gamma_k, G_k = (P_k^-1 + H_k^H H_k)^-1 and w = h~_k^H H_k G_k for the pixels chosen so far.
    class GreedyUserState
    {
    public:
        GreedyUserState() = default;

        // interferer_snr: normalized powers of the other K-1 UEs; G starts at P_k
        GreedyUserState(double own_snr, const std::vector<double> &interferer_snr) : snr_(own_snr)
        {
            const Eigen::Index n = Eigen::Index(interferer_snr.size());
            G_ = CMatrix::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                G_(i, i) = interferer_snr[std::size_t(i)];
            s_ = CVector::Zero(n);
            w_ = CVector::Zero(n);
        }

        double gamma() const { return gamma_; }
        const CMatrix &G() const { return G_; }
        Eigen::Index interferers() const { return G_.rows(); }

        // SINR after adding a pixel with own channel entry h and interferer column d (d_i = conj(h_{i,m}))
        double incremental_sinr(cdouble h, const CVector &d) const
        {
            check(d);
            const cdouble num = std::conj(h) - w_.cwiseProduct(d).sum();
            const double den = 1.0 + (d.adjoint() * G_ * d)(0, 0).real();
            return gamma_ + snr_ * std::norm(num) / den;
        }

        // Adds the pixel: rank-one update of G, no fresh inversion
        void commit(cdouble h, const CVector &d)
        {
            check(d);
            const double next = incremental_sinr(h, d);
            const CVector Gd = G_ * d;
            const double den = 1.0 + d.dot(Gd).real();
            G_ -= (Gd * Gd.adjoint()) / den;
            s_ += std::conj(h) * d.conjugate();
            w_ = G_.transpose() * s_;
            gamma_ = next;
        }

    private:
        void check(const CVector &d) const
        {
            if (d.size() != G_.rows())
                throw std::invalid_argument("GreedyUserState: column has " + std::to_string(d.size()) +
                                            " entries, state expects " + std::to_string(G_.rows()));
        }

        double snr_ = 0.0;
        double gamma_ = 0.0;
        CMatrix G_;
        CVector s_; // (h~^H H)^T
        CVector w_; // (h~^H H G)^T
    };

    struct GreedyResult
    {
        std::vector<int> selection_order; // pixels in the order they were picked
        std::vector<int> pixels;          // same pixels, ascending
        std::vector<double> step_rates;   // R^(n), n = 1..N
        std::vector<double> sinr;         // final gamma_k
        double sum_rate = 0.0;
        long computations = 0;            // candidate evaluations, (2M - N + 1) N / 2
    };

    // Analytic candidate-evaluation count of greedy selection
    inline long greedy_computation_count(int pixels, int activated)
    {
        return long(2 * pixels - activated + 1) * activated / 2;
    }

    // Builds the interferer column d_{k,m} from the grid channel row of pixel m
    inline CVector interferer_column(const CMatrix &full, int pixel, Eigen::Index k)
    {
        const Eigen::Index K = full.cols();
        CVector d(K - 1);
        for (Eigen::Index i = 0, j = 0; i < K; ++i)
            if (i != k)
                d[j++] = std::conj(full(pixel - 1, i));
        return d;
    }

    // Sequential antenna selection maximizing the sum rate at every step; ties go to the lowest pixel index
    inline GreedyResult greedy_as(const CMatrix &full, const std::vector<double> &snr, int activated)
    {
        detail::check_powers(full, snr);
        const int M = int(full.rows());
        const Eigen::Index K = full.cols();
        if (activated < 1 || activated > M)
            throw std::invalid_argument("greedy_as: activated pixel count must be in [1, M]");

        std::vector<GreedyUserState> users;
        for (Eigen::Index k = 0; k < K; ++k)
        {
            std::vector<double> others;
            for (Eigen::Index i = 0; i < K; ++i)
                if (i != k)
                    others.push_back(snr[std::size_t(i)]);
            users.emplace_back(snr[std::size_t(k)], others);
        }

        // interferer columns of every pixel and UE, built once
        std::vector<std::vector<CVector>> cols(static_cast<std::size_t>(M));
        for (int m = 1; m <= M; ++m)
            for (Eigen::Index k = 0; k < K; ++k)
                cols[std::size_t(m - 1)].push_back(interferer_column(full, m, k));

        GreedyResult res;
        std::vector<bool> taken(std::size_t(M), false);
        for (int n = 1; n <= activated; ++n)
        {
            int best = 0;
            double best_rate = -1.0;
            for (int m = 1; m <= M; ++m)
            {
                if (taken[std::size_t(m - 1)])
                    continue;
                double rate = 0.0;
                for (Eigen::Index k = 0; k < K; ++k)
                    rate += std::log2(1.0 + users[std::size_t(k)].incremental_sinr(full(m - 1, k), cols[std::size_t(m - 1)][std::size_t(k)]));
                ++res.computations;
                if (best == 0 || strictly_better(rate, best_rate))
                {
                    best = m;
                    best_rate = rate;
                }
            }
            for (Eigen::Index k = 0; k < K; ++k)
                users[std::size_t(k)].commit(full(best - 1, k), cols[std::size_t(best - 1)][std::size_t(k)]);
            taken[std::size_t(best - 1)] = true;
            res.selection_order.push_back(best);
            double r = 0.0;
            for (const auto &u : users)
                r += std::log2(1.0 + u.gamma());
            res.step_rates.push_back(r);
        }
        res.pixels = res.selection_order;
        std::sort(res.pixels.begin(), res.pixels.end());
        for (const auto &u : users)
            res.sinr.push_back(u.gamma());
        res.sum_rate = res.step_rates.back();
        return res;
    }

    inline GreedyResult greedy_as(const AntennaGrid &grid, int activated, const Scene &scene)
    {
        return greedy_as(grid_channel_matrix(grid, scene), scene.snr(), activated);
    }

    // One row of the communication results table
    struct CommRecord
    {
        std::string scheme;
        std::string arch;   // architecture name, "AS" for greedy selection
        int phi = 0;
        int ref_index = 0;  // 0 for greedy selection
        double utility = 0.0;
        long overhead = 0;
        std::uint64_t seed = 0;
        double power_dbm = 0.0;
        int users = 0;
    };

    inline CommRecord make_comm_record(const TrainingResult &r, std::uint64_t seed, double power_dbm, int users)
    {
        return {r.scheme, std::string(arch_name(r.best.arch)), r.best.phi, r.best.ref_index, r.best_utility,
                long(r.overhead), seed, power_dbm, users};
    }

    inline CommRecord make_comm_record(const GreedyResult &r, std::uint64_t seed, double power_dbm, int users)
    {
        return {"greedy", "AS", 0, 0, r.sum_rate, r.computations, seed, power_dbm, users};
    }

    inline void write_comm_header(std::ostream &os)
    {
        os << "scheme,arch,phi,ref_index,utility,overhead,seed,power_dbm,K\n";
    }

    inline void write_comm_record(std::ostream &os, const CommRecord &r)
    {
        CsvWriter w(os);
        w.field(r.scheme).field(r.arch).field(r.phi).field(r.ref_index).field(r.utility).field(r.overhead);
        w.field((unsigned long long)r.seed).field(r.power_dbm).field(r.users);
        w.end();
    }
}

#endif
