// Copyright 2026 The GPGP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gpgp/benchmark.hpp"
#include "gpgp/clustering.hpp"
#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"
#include "gpgp/gp_classifier.hpp"
#include "gpgp/io.hpp"
#include "gpgp/kernels.hpp"
#include "gpgp/metrics.hpp"
#include "gpgp/preference_models.hpp"
#include "gpgp/seeds.hpp"
#include "gpgp/synthetic.hpp"
