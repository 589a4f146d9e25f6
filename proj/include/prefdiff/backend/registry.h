// Copyright 2026 The prefdiff Authors
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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prefdiff/backend/backend.h"

namespace prefdiff {

struct BackendContext {
  std::uint64_t seed = 13;
  // Directory for model weights; taken from PREFDIFF_MODEL_CACHE when set.
  std::string model_cache_dir;
};

using BackendFactory = std::function<std::unique_ptr<Backend>(
    const nlohmann::json& params, const BackendContext& ctx)>;

/// Adapters are looked up by `backend.name`. The toy backends are registered
/// by default; pretrained adapters register themselves the same way.
void register_backend(const std::string& name, BackendFactory factory);
std::vector<std::string> registered_backends();

/// Throws ConfigError for unknown names or parameter keys.
std::unique_ptr<Backend> make_backend(const std::string& name,
                                      const nlohmann::json& params,
                                      const BackendContext& ctx);

BackendContext default_backend_context(std::uint64_t seed);

}  // namespace prefdiff
