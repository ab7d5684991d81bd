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

#ifndef FLEXARRAY_CSV_HPP
#define FLEXARRAY_CSV_HPP

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flexarray
{
    // Locale-independent decimal with 12 significant digits
    inline std::string csv_number(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
        if (r.ec != std::errc())
            throw std::runtime_error("csv_number: conversion failed");
        return std::string(buf, r.ptr);
    }

    // Writes comma-separated fields terminated by a newline
    class CsvWriter
    {
    public:
        explicit CsvWriter(std::ostream &os) : os_(os) {}

        CsvWriter &field(std::string_view s)
        {
            sep();
            os_ << s;
            return *this;
        }
        CsvWriter &field(double v) { return field(std::string_view(csv_number(v))); }
        CsvWriter &field(long long v) { return field(std::string_view(std::to_string(v))); }
        CsvWriter &field(unsigned long long v) { return field(std::string_view(std::to_string(v))); }
        CsvWriter &field(int v) { return field((long long)v); }
        CsvWriter &field(long v) { return field((long long)v); }
        CsvWriter &field(unsigned long v) { return field((unsigned long long)v); }

        void end()
        {
            os_ << '\n';
            first_ = true;
        }

    private:
        void sep()
        {
            if (!first_)
                os_ << ',';
            first_ = false;
        }
        std::ostream &os_;
        bool first_ = true;
    };
}

#endif
