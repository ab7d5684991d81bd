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

#ifndef FLEXARRAY_CODEBOOK_HPP
#define FLEXARRAY_CODEBOOK_HPP

#include "grid.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace flexarray
{
    namespace detail
    {
        inline long floor_div(long a, long b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }
        inline long ceil_div(long a, long b) { return -floor_div(-a, b); }

        inline long isqrt(long v)
        {
            if (v < 0)
                throw std::domain_error("isqrt of negative value");
            long r = long(std::sqrt(double(v)));
            while (r * r > v)
                --r;
            while ((r + 1) * (r + 1) <= v)
                ++r;
            return r;
        }

        inline void check_sizes(int pixels, int activated)
        {
            if (activated < 1)
                throw std::invalid_argument("activated pixel count must be at least 1");
            if (activated > pixels)
                throw std::invalid_argument("activated pixel count " + std::to_string(activated) +
                                            " exceeds grid size " + std::to_string(pixels));
        }

        inline void check_modules(int activated, int modules)
        {
            if (modules < 1 || activated % modules != 0)
                throw std::invalid_argument("module count " + std::to_string(modules) +
                                            " must divide the activated pixel count " + std::to_string(activated));
        }
    }

    // Largest USA sparsity level, floor((M - 1) / (N - 1)); 0 when N < 2
    inline int eta_max(int pixels, int activated)
    {
        return activated < 2 ? 0 : (pixels - 1) / (activated - 1);
    }

    // Largest MoA inter-module spacing level, floor((M - N_m) / (Z - 1)); 0 when Z < 2
    inline int gamma_max(int pixels, int activated, int modules)
    {
        detail::check_modules(activated, modules);
        if (modules < 2)
            return 0;
        return (pixels - activated / modules) / (modules - 1);
    }

    // Feasible inner-array sizes of a two-level nested array.
    // Closed form: every N_in in [1, N-2] when (N+1)^2 <= 4M; otherwise the two tails
    // [1, N_in^l] and [N_in^u, N-2] around the roots of N_in^2 - (N-1) N_in + M - N = 0.
    // Empty when N_in^l < 1 (no nested array fits).
    inline std::vector<int> feasible_na_set(int pixels, int activated)
    {
        const long M = pixels, N = activated;
        std::vector<int> out;
        if (N < 3 || M < N)
            return out;

        const long disc = (N + 1) * (N + 1) - 4 * M;
        if (disc <= 0)
        {
            for (int n = 1; n <= activated - 2; ++n)
                out.push_back(n);
            return out;
        }

        // Exact floor((N-1-sqrt(D))/2) and ceil((N-1+sqrt(D))/2) in integers
        const long s = detail::isqrt(disc);
        const bool square = s * s == disc;
        const long lower = square ? detail::floor_div(N - 1 - s, 2) : detail::floor_div(N - 2 - s, 2);
        const long upper = square ? detail::ceil_div(N - 1 + s, 2) : detail::ceil_div(N + s, 2);
        if (lower < 1)
            return out;

        for (long n = 1; n <= lower; ++n)
            out.push_back(int(n));
        for (long n = std::max(upper, lower + 1); n <= N - 2; ++n)
            out.push_back(int(n));
        return out;
    }

    // Feasible first-array sizes of a co-prime array: 2 <= N_f <= N_s = N + 1 - N_f,
    // gcd(N_f, N_s) = 1 and (N_s - 1) N_f <= M - 1.
    inline std::vector<int> feasible_cpa_set(int pixels, int activated)
    {
        std::vector<int> out;
        if (activated < 3)
            return out;
        for (int nf = 2; nf <= (activated + 1) / 2; ++nf)
        {
            const int ns = activated + 1 - nf;
            if (ns < 2 || nf >= ns)
                continue;
            if (std::gcd(nf, ns) != 1)
                continue;
            if (long(ns - 1) * nf <= long(pixels) - 1)
                out.push_back(nf);
        }
        return out;
    }

    // Architecture-specific parameter values, ascending. CA has the single value 0.
    inline std::vector<int> parameter_set(Arch arch, int pixels, int activated, int modules)
    {
        detail::check_sizes(pixels, activated);
        detail::check_modules(activated, modules);
        std::vector<int> out;
        switch (arch)
        {
        case Arch::CA:
            out.push_back(0);
            break;
        case Arch::USA:
            for (int eta = 2; eta <= eta_max(pixels, activated); ++eta)
                out.push_back(eta);
            break;
        case Arch::MoA:
        {
            const int nm = activated / modules;
            for (int g = nm + 1; g <= gamma_max(pixels, activated, modules); ++g)
                out.push_back(g);
            break;
        }
        case Arch::NA:
            out = feasible_na_set(pixels, activated);
            break;
        case Arch::CPA:
            out = feasible_cpa_set(pixels, activated);
            break;
        }
        return out;
    }

    // Pixel offsets of a layout relative to its reference pixel, ascending and starting at 0
    inline std::vector<int> layout_offsets(Arch arch, int activated, int modules, int phi)
    {
        const int N = activated;
        std::vector<int> off;
        off.reserve(std::size_t(N));
        switch (arch)
        {
        case Arch::CA:
            for (int n = 0; n < N; ++n)
                off.push_back(n);
            break;
        case Arch::USA:
            for (int n = 0; n < N; ++n)
                off.push_back(n * phi);
            break;
        case Arch::MoA:
        {
            detail::check_modules(N, modules);
            const int nm = N / modules;
            for (int z = 0; z < modules; ++z)
                for (int n = 0; n < nm; ++n)
                    off.push_back(z * phi + n);
            break;
        }
        case Arch::NA:
            // inner CA of N_in pixels, then an outer USA of sparsity N_in + 1
            for (int n = 1; n <= N; ++n)
                off.push_back(n <= phi ? n - 1 : (n - phi) * (phi + 1) - 1);
            break;
        case Arch::CPA:
        {
            const int ns = N + 1 - phi;
            std::set<int> u;
            for (int i = 0; i < phi; ++i)
                u.insert(i * ns);
            for (int i = 0; i < ns; ++i)
                u.insert(i * phi);
            off.assign(u.begin(), u.end());
            break;
        }
        }
        return off;
    }

    // Consecutive pixels occupied by one realization, D_a / d + 1
    inline int required_span(Arch arch, int activated, int modules, int phi)
    {
        const int N = activated;
        switch (arch)
        {
        case Arch::CA:
            return N;
        case Arch::USA:
            return (N - 1) * phi + 1;
        case Arch::MoA:
            return (modules - 1) * phi + N / modules;
        case Arch::NA:
            return (N - phi) * (phi + 1);
        case Arch::CPA:
            return (N - phi) * phi + 1;
        }
        return 0;
    }

    // Builds one codeword after validating the parameter and the reference pixel
    inline Codeword make_codeword(const AntennaGrid &grid, Arch arch, int activated, int modules, int phi, int ref_index)
    {
        const int M = grid.pixels();
        detail::check_sizes(M, activated);
        detail::check_modules(activated, modules);

        const auto params = parameter_set(arch, M, activated, modules);
        if (!std::binary_search(params.begin(), params.end(), phi))
            throw std::invalid_argument(std::string(arch_name(arch)) + ": parameter " + std::to_string(phi) +
                                        " is not feasible for M=" + std::to_string(M) + ", N=" + std::to_string(activated));

        const int span = required_span(arch, activated, modules, phi);
        if (ref_index < 1)
            throw std::out_of_range(std::string(arch_name(arch)) + ": reference index " + std::to_string(ref_index) +
                                    " below b_min (index 1)");
        if (ref_index > M - span + 1)
            throw std::out_of_range(std::string(arch_name(arch)) + ": reference index " + std::to_string(ref_index) +
                                    " exceeds b_max (index " + std::to_string(M - span + 1) + ")");

        Codeword cw;
        cw.arch = arch;
        cw.phi = phi;
        cw.ref_index = ref_index;
        cw.pixels = layout_offsets(arch, activated, modules, phi);
        for (int &p : cw.pixels)
            p += ref_index;
        return cw;
    }

    inline Codeword codeword_ca(const AntennaGrid &grid, int activated, int ref_index)
    {
        return make_codeword(grid, Arch::CA, activated, 1, 0, ref_index);
    }

    inline Codeword codeword_usa(const AntennaGrid &grid, int activated, int eta, int ref_index)
    {
        return make_codeword(grid, Arch::USA, activated, 1, eta, ref_index);
    }

    inline Codeword codeword_moa(const AntennaGrid &grid, int activated, int modules, int gamma, int ref_index)
    {
        return make_codeword(grid, Arch::MoA, activated, modules, gamma, ref_index);
    }

    inline Codeword codeword_na(const AntennaGrid &grid, int activated, int n_in, int ref_index)
    {
        return make_codeword(grid, Arch::NA, activated, 1, n_in, ref_index);
    }

    inline Codeword codeword_cpa(const AntennaGrid &grid, int activated, int n_f, int ref_index)
    {
        return make_codeword(grid, Arch::CPA, activated, 1, n_f, ref_index);
    }

    // Partition sizes from the closed-form realization counts
    inline long closed_form_count(Arch arch, int pixels, int activated, int modules)
    {
        detail::check_sizes(pixels, activated);
        detail::check_modules(activated, modules);
        const long M = pixels, N = activated;
        switch (arch)
        {
        case Arch::CA:
            return M - N + 1;
        case Arch::USA:
        {
            const long em = eta_max(pixels, activated);
            if (em < 2)
                return 0;
            return (em - 1) * M - (N - 1) * (em + 2) * (em - 1) / 2;
        }
        case Arch::MoA:
        {
            const long gm = gamma_max(pixels, activated, modules);
            const long nm = N / modules, Z = modules;
            if (gm <= nm)
                return 0;
            return (gm - nm) * (M - nm + 1) - (Z - 1) * (nm + 1 + gm) * (gm - nm) / 2;
        }
        case Arch::NA:
        {
            long total = 0;
            for (int nin : feasible_na_set(pixels, activated))
                total += M - (N - nin) * (nin + 1) + 1;
            return total;
        }
        case Arch::CPA:
        {
            long total = 0;
            for (int nf : feasible_cpa_set(pixels, activated))
                total += M - (N - nf) * long(nf);
            return total;
        }
        }
        return 0;
    }

    // Ordered, immutable collection of codewords with per-architecture partitions
    class Codebook
    {
    public:
        struct Range
        {
            std::size_t begin = 0, end = 0;
            std::size_t size() const { return end - begin; }
        };

        Codebook() = default;

        // Entries must be grouped by architecture in codebook order
        Codebook(int pixels, int activated, int modules, std::vector<Codeword> entries)
            : pixels_(pixels), activated_(activated), modules_(modules), entries_(std::move(entries))
        {
            std::size_t i = 0;
            for (Arch a : all_archs)
            {
                Range r{i, i};
                while (i < entries_.size() && entries_[i].arch == a)
                    ++i;
                r.end = i;
                ranges_[arch_slot(a)] = r;
            }
            if (i != entries_.size())
                throw std::invalid_argument("Codebook: entries are not grouped in architecture order");
        }

        int pixels() const { return pixels_; }
        int activated() const { return activated_; }
        int modules() const { return modules_; }

        std::size_t size() const { return entries_.size(); }
        bool empty() const { return entries_.empty(); }
        const Codeword &operator[](std::size_t i) const { return entries_[i]; }
        const std::vector<Codeword> &entries() const { return entries_; }
        auto begin() const { return entries_.begin(); }
        auto end() const { return entries_.end(); }

        Range partition(Arch a) const { return ranges_[arch_slot(a)]; }
        std::size_t count(Arch a) const { return ranges_[arch_slot(a)].size(); }

        // Number of distinct activation patterns across all partitions
        std::size_t distinct_count() const
        {
            std::set<std::vector<int>> seen;
            for (const auto &cw : entries_)
                seen.insert(cw.pixels);
            return seen.size();
        }

        // Codebook index of an activation pattern, or size() if absent
        std::size_t find(const std::vector<int> &pixels) const
        {
            for (std::size_t i = 0; i < entries_.size(); ++i)
                if (entries_[i].pixels == pixels)
                    return i;
            return entries_.size();
        }

    private:
        int pixels_ = 0, activated_ = 0, modules_ = 1;
        std::vector<Codeword> entries_;
        std::array<Range, 5> ranges_{};
    };

    // All realizations of one architecture: ascending parameter, then ascending reference pixel
    inline std::vector<Codeword> enumerate_arch(const AntennaGrid &grid, Arch arch, int activated, int modules)
    {
        std::vector<Codeword> out;
        const int M = grid.pixels();
        for (int phi : parameter_set(arch, M, activated, modules))
        {
            const int last = M - required_span(arch, activated, modules, phi) + 1;
            for (int ref = 1; ref <= last; ++ref)
                out.push_back(make_codeword(grid, arch, activated, modules, phi, ref));
        }
        return out;
    }

    // Full array configuration codebook: CA, USA, MoA, NA and CPA partitions concatenated
    inline Codebook build_acc(const AntennaGrid &grid, int activated, int modules)
    {
        detail::check_sizes(grid.pixels(), activated);
        detail::check_modules(activated, modules);
        std::vector<Codeword> all;
        for (Arch a : all_archs)
        {
            auto part = enumerate_arch(grid, a, activated, modules);
            all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return Codebook(grid.pixels(), activated, modules, std::move(all));
    }

    // Single-architecture codebook with the same ordering as the ACC partition
    inline Codebook build_arch_codebook(const AntennaGrid &grid, Arch arch, int activated, int modules)
    {
        return Codebook(grid.pixels(), activated, modules, enumerate_arch(grid, arch, activated, modules));
    }

    // Non-overlapping tiles for the array-level scan: for every parameter value, tiles of
    // span N_bar start at b_min with stride N_bar, floor(M / N_bar) of them.
    inline Codebook build_stage1_codebook(const AntennaGrid &grid, Arch arch, int activated, int modules)
    {
        const int M = grid.pixels();
        std::vector<Codeword> out;
        for (int phi : parameter_set(arch, M, activated, modules))
        {
            const int span = required_span(arch, activated, modules, phi);
            const int tiles = M / span;
            for (int t = 0; t < tiles; ++t)
                out.push_back(make_codeword(grid, arch, activated, modules, phi, 1 + t * span));
        }
        return Codebook(M, activated, modules, std::move(out));
    }

    inline std::map<Arch, Codebook> build_stage1_codebooks(const AntennaGrid &grid, int activated, int modules)
    {
        std::map<Arch, Codebook> out;
        for (Arch a : all_archs)
            out.emplace(a, build_stage1_codebook(grid, a, activated, modules));
        return out;
    }

    // Number of pixel-level refinements after a stage-1 winner:
    // T = min(N_bar - 1, (M - 1)/2 - (N_bar - 1) - b/d), i.e. min(N_bar - 1, M - N_bar + 1 - ref)
    inline int stage2_count(int pixels, int span, int ref_index)
    {
        return std::max(0, std::min(span - 1, pixels - span + 1 - ref_index));
    }

    // Codewords scanned in stage 2: same parameter, reference shifted by 1..T pixels
    inline Codebook build_stage2_codebook(const AntennaGrid &grid, const Codeword &stage1, int activated, int modules)
    {
        const int M = grid.pixels();
        const int span = required_span(stage1.arch, activated, modules, stage1.phi);
        if (span < 1 || (stage1.ref_index - 1) % span != 0 || (stage1.ref_index - 1) / span >= M / span)
            throw std::invalid_argument(std::string(arch_name(stage1.arch)) + ": (" + std::to_string(stage1.phi) +
                                        ", " + std::to_string(stage1.ref_index) + ") is not a stage-1 codeword");
        // validates the parameter as well
        make_codeword(grid, stage1.arch, activated, modules, stage1.phi, stage1.ref_index);

        const int T = stage2_count(M, span, stage1.ref_index);
        std::vector<Codeword> out;
        out.reserve(std::size_t(T));
        for (int t = 1; t <= T; ++t)
            out.push_back(make_codeword(grid, stage1.arch, activated, modules, stage1.phi, stage1.ref_index + t));
        return Codebook(M, activated, modules, std::move(out));
    }

    // Largest possible stage-2 scan for one architecture: floor((M - 1) / 2), i.e. M/2 - 1 for even M
    inline int worst_case_stage2(int pixels) { return (pixels - 1) / 2; }

    // Sum of stage-1 sizes plus the worst-case stage-2 scan of every non-empty architecture
    inline long worst_case_two_stage_overhead(const AntennaGrid &grid, int activated, int modules)
    {
        long total = 0;
        for (const auto &[arch, cb] : build_stage1_codebooks(grid, activated, modules))
            if (!cb.empty())
                total += long(cb.size()) + worst_case_stage2(grid.pixels());
        return total;
    }

    // Line format: arch,phi,ref_index,idx_1,...,idx_N (1-based pixel indices)
    inline void write_codeword(std::ostream &os, const Codeword &cw)
    {
        os << arch_name(cw.arch) << ',' << cw.phi << ',' << cw.ref_index;
        for (int p : cw.pixels)
            os << ',' << p;
        os << '\n';
    }

    inline void write_codebook(std::ostream &os, const Codebook &cb)
    {
        for (const auto &cw : cb)
            write_codeword(os, cw);
    }

    inline Codeword parse_codeword(const std::string &line)
    {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (fields.size() < 4)
            throw std::invalid_argument("codeword line needs at least 4 fields: '" + line + "'");
        Codeword cw;
        cw.arch = parse_arch(fields[0]);
        try
        {
            cw.phi = std::stoi(fields[1]);
            cw.ref_index = std::stoi(fields[2]);
            for (std::size_t i = 3; i < fields.size(); ++i)
                cw.pixels.push_back(std::stoi(fields[i]));
        }
        catch (const std::logic_error &)
        {
            throw std::invalid_argument("malformed integer in codeword line: '" + line + "'");
        }
        if (!std::is_sorted(cw.pixels.begin(), cw.pixels.end()) ||
            std::adjacent_find(cw.pixels.begin(), cw.pixels.end()) != cw.pixels.end())
            throw std::invalid_argument("codeword pixel indices must be strictly increasing: '" + line + "'");
        return cw;
    }

    inline Codebook read_codebook(std::istream &is, int pixels, int activated, int modules)
    {
        std::vector<Codeword> entries;
        std::string line;
        while (std::getline(is, line))
        {
            if (line.empty() || line[0] == '#')
                continue;
            auto cw = parse_codeword(line);
            if (int(cw.pixels.size()) != activated)
                throw std::invalid_argument("codeword has " + std::to_string(cw.pixels.size()) + " pixels, expected " +
                                            std::to_string(activated));
            if (cw.pixels.front() < 1 || cw.pixels.back() > pixels)
                throw std::out_of_range("codeword pixel index outside the grid: '" + line + "'");
            entries.push_back(std::move(cw));
        }
        return Codebook(pixels, activated, modules, std::move(entries));
    }
}

#endif
