// Copyright 2026 The timebin Authors
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

#include "timebin/analysis.hpp"
#include "timebin/elements.hpp"
#include "timebin/errors.hpp"
#include "timebin/fock_state.hpp"
#include "timebin/gates.hpp"
#include "timebin/json_io.hpp"
#include "timebin/linear_optics.hpp"
#include "timebin/mode.hpp"
#include "timebin/permanent.hpp"
#include "timebin/program.hpp"
