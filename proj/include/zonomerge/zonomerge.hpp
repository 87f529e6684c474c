/*
 * Copyright 2026 The Zonomerge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ZONOMERGE_ZONOMERGE_HPP
#define ZONOMERGE_ZONOMERGE_HPP

#include "zonomerge/activation.hpp"
#include "zonomerge/enclosure.hpp"
#include "zonomerge/errors.hpp"
#include "zonomerge/instance.hpp"
#include "zonomerge/interval.hpp"
#include "zonomerge/network.hpp"
#include "zonomerge/reduction.hpp"
#include "zonomerge/report.hpp"
#include "zonomerge/verifier.hpp"
#include "zonomerge/zonotope.hpp"

#endif  // ZONOMERGE_ZONOMERGE_HPP
