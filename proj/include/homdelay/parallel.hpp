// Copyright 2026 The homdelay Authors
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

#include <cstddef>
#include <functional>

namespace homdelay {

/// Lane count from HOMDELAY_THREADS (0 or unset = hardware concurrency).
std::size_t configured_lanes();

/// Runs body(i) for i in [0, n) on up to `lanes` threads (0 = configured_lanes()).
/// Indices are claimed dynamically; the exception from the lowest failing index
/// is rethrown after all lanes finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t lanes = 0);

}  // namespace homdelay
