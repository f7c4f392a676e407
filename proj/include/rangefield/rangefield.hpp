/*
 * Copyright 2026 The rangefield Authors
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
#pragma once

#include "rangefield/constants.hpp"
#include "rangefield/costs.hpp"
#include "rangefield/experiment_config.hpp"
#include "rangefield/experiments.hpp"
#include "rangefield/geometry.hpp"
#include "rangefield/io.hpp"
#include "rangefield/kdtree.hpp"
#include "rangefield/limit_field.hpp"
#include "rangefield/meansolver.hpp"
#include "rangefield/parallel.hpp"
#include "rangefield/partition_tree.hpp"
#include "rangefield/quadrature.hpp"
#include "rangefield/quadtree.hpp"
#include "rangefield/rng.hpp"
#include "rangefield/split_family.hpp"
#include "rangefield/stats.hpp"
#include "rangefield/version.hpp"
#include "rangefield/worst_case.hpp"
