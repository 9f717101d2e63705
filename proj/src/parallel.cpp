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

#include "homdelay/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "homdelay/errors.hpp"

namespace homdelay {

std::size_t configured_lanes() {
  std::size_t lanes = 0;
  if (const char* env = std::getenv("HOMDELAY_THREADS"); env != nullptr && *env != '\0') {
    const std::string_view text(env);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), lanes);
    if (ec != std::errc() || end != text.data() + text.size())
      throw ConfigError("HOMDELAY_THREADS must be a non-negative integer, got '" +
                        std::string(text) + "'");
  }
  if (lanes == 0) lanes = std::max(1u, std::thread::hardware_concurrency());
  return lanes;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t lanes) {
  if (n == 0) return;
  if (lanes == 0) lanes = configured_lanes();
  lanes = std::min(lanes, n);
  if (lanes == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(lanes - 1);
    for (std::size_t k = 1; k < lanes; ++k) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace homdelay
