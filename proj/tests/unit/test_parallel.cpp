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

#include <atomic>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

#include "homdelay/errors.hpp"
#include "homdelay/parallel.hpp"

using namespace homdelay;

namespace {

struct EnvGuard {
  explicit EnvGuard(const char* value) {
    if (const char* old = std::getenv("HOMDELAY_THREADS")) saved = old;
    if (value) ::setenv("HOMDELAY_THREADS", value, 1);
    else ::unsetenv("HOMDELAY_THREADS");
  }
  ~EnvGuard() {
    if (saved) ::setenv("HOMDELAY_THREADS", saved->c_str(), 1);
    else ::unsetenv("HOMDELAY_THREADS");
  }
  std::optional<std::string> saved;
};

}  // namespace

TEST_SUITE("parallel") {

TEST_CASE("every index runs exactly once") {
  for (std::size_t lanes : {1u, 2u, 4u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, lanes);
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  int calls = 0;
  parallel_for(0, [&](std::size_t) { ++calls; }, 4);
  CHECK(calls == 0);
}

TEST_CASE("the lowest failing index is rethrown") {
  for (std::size_t lanes : {1u, 3u}) {
    std::atomic<int> done{0};
    try {
      parallel_for(
          200,
          [&](std::size_t i) {
            ++done;
            if (i == 17 || i == 150) throw ConfigError("index " + std::to_string(i));
          },
          lanes);
      FAIL("expected an exception");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()) == "index 17");
    }
    CHECK(done.load() >= 18);
  }
}

TEST_CASE("lane count from the environment") {
  {
    EnvGuard g("3");
    CHECK(configured_lanes() == 3);
  }
  {
    EnvGuard g("0");
    CHECK(configured_lanes() >= 1);
  }
  {
    EnvGuard g(nullptr);
    CHECK(configured_lanes() >= 1);
  }
  {
    EnvGuard g("many");
    CHECK_THROWS_AS(configured_lanes(), ConfigError);
  }
  {
    EnvGuard g("-2");
    CHECK_THROWS_AS(configured_lanes(), ConfigError);
  }
}

}  // TEST_SUITE
