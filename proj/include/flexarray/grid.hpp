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

#ifndef FLEXARRAY_GRID_HPP
#define FLEXARRAY_GRID_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flexarray
{
    // Speed of light in [m/s]
    inline constexpr double speed_of_light = 299792458.0;

    // Physical XL-ULA of candidate antenna pixels placed on the y-axis and centered at the origin.
    // Pixels are addressed by 1-based indices; pixel m sits at y = (2m - M - 1) / 2 * pitch.
    class AntennaGrid
    {
    public:
        AntennaGrid(int pixels, double pitch, double wavelength)
            : pixels_(pixels), pitch_(pitch), wavelength_(wavelength)
        {
            if (pixels < 2)
                throw std::invalid_argument("AntennaGrid: pixel count must be at least 2");
            if (!(pitch > 0.0) || !std::isfinite(pitch))
                throw std::invalid_argument("AntennaGrid: pixel pitch must be positive");
            if (!(wavelength > 0.0) || !std::isfinite(wavelength))
                throw std::invalid_argument("AntennaGrid: wavelength must be positive");
        }

        // Half-wavelength grid for the given carrier frequency in [Hz]
        static AntennaGrid half_wavelength(int pixels, double carrier_hz)
        {
            if (!(carrier_hz > 0.0))
                throw std::invalid_argument("AntennaGrid: carrier frequency must be positive");
            const double lambda = speed_of_light / carrier_hz;
            return AntennaGrid(pixels, 0.5 * lambda, lambda);
        }

        int pixels() const { return pixels_; }
        double pitch() const { return pitch_; }
        double wavelength() const { return wavelength_; }

        // Offset of pixel m from the origin in units of the pitch, (2m - M - 1) / 2
        double offset(int index) const
        {
            check_index(index);
            return 0.5 * double(2 * index - pixels_ - 1);
        }

        double position(int index) const { return offset(index) * pitch_; }

        std::vector<double> positions() const
        {
            std::vector<double> y(static_cast<std::size_t>(pixels_));
            for (int m = 1; m <= pixels_; ++m)
                y[std::size_t(m - 1)] = position(m);
            return y;
        }

        // Index of the pixel located at y; throws if y is not on the grid
        int index_at(double y) const
        {
            const double m = y / pitch_ + 0.5 * double(pixels_ + 1);
            const double r = std::round(m);
            if (std::abs(m - r) > 1e-9 || r < 1.0 || r > double(pixels_))
                throw std::out_of_range("AntennaGrid: position " + std::to_string(y) + " is not a pixel position");
            return int(r);
        }

        void check_index(int index) const
        {
            if (index < 1 || index > pixels_)
                throw std::out_of_range("AntennaGrid: pixel index " + std::to_string(index) +
                                        " outside [1, " + std::to_string(pixels_) + "]");
        }

    private:
        int pixels_;
        double pitch_;
        double wavelength_;
    };

    // Array architectures covered by the configuration codebook, in codebook order
    enum class Arch
    {
        CA,
        USA,
        MoA,
        NA,
        CPA
    };

    inline constexpr std::array<Arch, 5> all_archs = {Arch::CA, Arch::USA, Arch::MoA, Arch::NA, Arch::CPA};

    inline constexpr std::size_t arch_slot(Arch a) { return std::size_t(a); }

    inline std::string_view arch_name(Arch a)
    {
        switch (a)
        {
        case Arch::CA:
            return "CA";
        case Arch::USA:
            return "USA";
        case Arch::MoA:
            return "MoA";
        case Arch::NA:
            return "NA";
        case Arch::CPA:
            return "CPA";
        }
        return "?";
    }

    inline Arch parse_arch(std::string_view name)
    {
        for (Arch a : all_archs)
            if (arch_name(a) == name)
                return a;
        throw std::invalid_argument("unknown array architecture '" + std::string(name) + "'");
    }

    // One activation pattern: N distinct pixel indices in increasing order.
    // 'phi' is the architecture-specific parameter (0 for CA, eta for USA, Gamma for MoA,
    // N_in for NA, N_f for CPA) and 'ref_index' the pixel holding the reference (bottom) position.
    struct Codeword
    {
        Arch arch = Arch::CA;
        int phi = 0;
        int ref_index = 1;
        std::vector<int> pixels;

        std::size_t size() const { return pixels.size(); }

        // Number of consecutive pixels spanned, D / d + 1
        int span() const { return pixels.empty() ? 0 : pixels.back() - pixels.front() + 1; }

        std::vector<double> positions(const AntennaGrid &grid) const
        {
            std::vector<double> y;
            y.reserve(pixels.size());
            for (int m : pixels)
                y.push_back(grid.position(m));
            return y;
        }

        bool operator==(const Codeword &) const = default;
    };
}

#endif
