// Copyright 2026 The entdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the numerical library (no harness, no OpenSSL).

#pragma once

#include "entdetect/analytics.hpp"
#include "entdetect/criteria.hpp"
#include "entdetect/errors.hpp"
#include "entdetect/qmat.hpp"
#include "entdetect/rng.hpp"
#include "entdetect/sampling.hpp"
#include "entdetect/states.hpp"
#include "entdetect/version.hpp"
