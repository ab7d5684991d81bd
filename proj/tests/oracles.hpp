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

// Independent reference implementations used only by the tests.
// They follow the layout definitions literally and trade speed for transparency.

#ifndef FLEXARRAY_TEST_ORACLES_HPP
#define FLEXARRAY_TEST_ORACLES_HPP

#include <algorithm>
#include <complex>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle
{
    // Offsets (units of d) of a layout built from the element-wise definitions
    inline std::set<int> layout(int arch, int N, int Z, int phi)
    {
        std::set<int> s;
        if (arch == 0)
            for (int n = 1; n <= N; ++n)
                s.insert(n - 1);
        else if (arch == 1)
            for (int n = 1; n <= N; ++n)
                s.insert((n - 1) * phi);
        else if (arch == 2)
        {
            int nm = N / Z;
            for (int z = 1; z <= Z; ++z)
                for (int n = 1; n <= nm; ++n)
                    s.insert((z - 1) * phi + (n - 1));
        }
        else if (arch == 3)
        {
            int nin = phi;
            for (int n = 1; n <= nin; ++n)
                s.insert(n - 1);
            for (int j = 1; j <= N - nin; ++j)
                s.insert(j * (nin + 1) - 1);
        }
        else
        {
            int nf = phi, ns = N + 1 - nf;
            for (int i = 0; i < nf; ++i)
                s.insert(i * ns);
            for (int i = 0; i < ns; ++i)
                s.insert(i * nf);
        }
        return s;
    }

    // Parameter values accepted by the definitions, by exhaustive trial
    inline std::vector<int> params(int arch, int M, int N, int Z)
    {
        std::vector<int> out;
        auto fits = [&](int phi)
        {
            auto s = layout(arch, N, Z, phi);
            return int(s.size()) == N && *s.rbegin() <= M - 1;
        };
        if (arch == 0)
            out.push_back(0);
        else if (arch == 1)
        {
            for (int eta = 2; eta <= M; ++eta)
                if (fits(eta))
                    out.push_back(eta);
        }
        else if (arch == 2)
        {
            if (Z >= 2)
                for (int g = N / Z + 1; g <= M; ++g)
                    if (fits(g))
                        out.push_back(g);
        }
        else if (arch == 3)
        {
            for (int nin = 1; nin <= N - 2; ++nin)
                if (long(N - nin) * (nin + 1) <= M)
                    out.push_back(nin);
        }
        else
        {
            for (int nf = 2; nf <= N; ++nf)
            {
                int ns = N + 1 - nf;
                if (nf < ns && std::gcd(nf, ns) == 1 && fits(nf))
                    out.push_back(nf);
            }
        }
        return out;
    }

    // Number of placements of every feasible layout that stay inside an M-pixel grid
    inline long count(int arch, int M, int N, int Z)
    {
        long total = 0;
        for (int phi : params(arch, M, N, Z))
        {
            auto s = layout(arch, N, Z, phi);
            for (int ref = 0; ref < M; ++ref)
                if (ref + *s.rbegin() <= M - 1)
                    ++total;
        }
        return total;
    }

    using cd = std::complex<double>;
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;

    // SINR by explicit inversion of the interference-plus-noise covariance
    inline std::vector<double> sinr_inverse(const Mat &H, const std::vector<double> &p)
    {
        const long N = H.rows(), K = H.cols();
        std::vector<double> out(std::size_t(K), 0.0);
        for (long k = 0; k < K; ++k)
        {
            Mat C = Mat::Identity(N, N);
            for (long i = 0; i < K; ++i)
                if (i != k)
                    C += p[std::size_t(i)] * H.col(i) * H.col(i).adjoint();
            Mat Ci = C.inverse();
            out[std::size_t(k)] = p[std::size_t(k)] * (H.col(k).adjoint() * Ci * H.col(k))(0, 0).real();
        }
        return out;
    }

    inline double sum_rate(const Mat &H, const std::vector<double> &p)
    {
        double s = 0.0;
        for (double g : sinr_inverse(H, p))
            s += std::log2(1.0 + g);
        return s;
    }

    // Exhaustive antenna selection over all N-subsets of the M rows of Hfull (small M only)
    inline double best_subset_rate(const Mat &Hfull, int N, const std::vector<double> &p)
    {
        const int M = int(Hfull.rows());
        std::vector<bool> pick(std::size_t(M), false);
        std::fill(pick.begin(), pick.begin() + N, true);
        double best = -1.0;
        do
        {
            Mat H(N, Hfull.cols());
            int r = 0;
            for (int m = 0; m < M; ++m)
                if (pick[std::size_t(m)])
                    H.row(r++) = Hfull.row(m);
            best = std::max(best, sum_rate(H, p));
        } while (std::prev_permutation(pick.begin(), pick.end()));
        return best;
    }
}

#endif
