// Copyright 2026 The qflow Authors
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


#pragma once

#include "qflow/anomaly.hpp"
#include "qflow/baselines/isolation_forest.hpp"
#include "qflow/baselines/lof.hpp"
#include "qflow/baselines/ocsvm.hpp"
#include "qflow/baselines/standardize.hpp"
#include "qflow/dataenc.hpp"
#include "qflow/distribution.hpp"
#include "qflow/experiment.hpp"
#include "qflow/gate.hpp"
#include "qflow/gatepool.hpp"
#include "qflow/genflow.hpp"
#include "qflow/lossdist.hpp"
#include "qflow/mcgs.hpp"
#include "qflow/qstate.hpp"
#include "qflow/random.hpp"
#include "qflow/swaptest.hpp"
