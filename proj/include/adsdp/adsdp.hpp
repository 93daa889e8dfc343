// Copyright 2026 The adsdp Authors
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

#ifndef ADSDP_ADSDP_HPP_
#define ADSDP_ADSDP_HPP_

#include "adsdp/accounting.hpp"
#include "adsdp/attribution.hpp"
#include "adsdp/baselines.hpp"
#include "adsdp/common.hpp"
#include "adsdp/events.hpp"
#include "adsdp/experiment.hpp"
#include "adsdp/mechanism.hpp"
#include "adsdp/quantile.hpp"
#include "adsdp/random.hpp"
#include "adsdp/scales.hpp"
#include "adsdp/stream.hpp"
#include "adsdp/svt.hpp"
#include "adsdp/synth.hpp"
#include "adsdp/workload.hpp"

#endif  // ADSDP_ADSDP_HPP_
