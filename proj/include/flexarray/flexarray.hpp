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

// Umbrella header

#ifndef FLEXARRAY_HPP
#define FLEXARRAY_HPP

#include "grid.hpp"
#include "codebook.hpp"
#include "rng.hpp"
#include "channel.hpp"
#include "scan.hpp"
#include "csv.hpp"
#include "comms.hpp"
#include "localization.hpp"
#include "experiment.hpp"

#endif
