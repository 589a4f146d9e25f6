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

#include "prefdiff/backend/registry.h"

#include <cstdlib>
#include <map>
#include <mutex>
#include <set>

#include "prefdiff/backend/toy_copy_backend.h"
#include "prefdiff/backend/toy_embedding_backend.h"
#include "prefdiff/common/error.h"

namespace prefdiff {
namespace {

void reject_unknown(const nlohmann::json& params, const std::set<std::string>& known,
                    const std::string& backend) {
  if (params.is_null()) return;
  if (!params.is_object()) raise(ErrorCode::kConfig, "backend.params must be an object");
  for (const auto& [key, _] : params.items()) {
    if (!known.count(key)) {
      raise(ErrorCode::kConfig, "unknown key backend.params." + key + " for backend " + backend);
    }
  }
}

template <typename T>
T get_or(const nlohmann::json& params, const char* key, T fallback) {
  if (params.is_null() || !params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    raise(ErrorCode::kConfig, std::string("backend.params.") + key + " has the wrong type");
  }
}

std::unique_ptr<Backend> make_toy_copy(const nlohmann::json& p, const BackendContext&) {
  reject_unknown(p, {"copy_mass", "vocab_size", "max_encoder_length", "piece_chars"},
                 "toy-copy");
  ToyCopyBackend::Options o;
  o.model.copy_mass = get_or(p, "copy_mass", o.model.copy_mass);
  o.model.vocab_size = get_or(p, "vocab_size", o.model.vocab_size);
  o.max_encoder_length = get_or(p, "max_encoder_length", o.max_encoder_length);
  o.piece_chars = get_or(p, "piece_chars", o.piece_chars);
  return std::make_unique<ToyCopyBackend>(o);
}

std::unique_ptr<Backend> make_toy_embedding(const nlohmann::json& p,
                                            const BackendContext& ctx) {
  reject_unknown(p,
                 {"vocab_size", "dim", "sharpness", "filler_count", "filler_prior", "seed",
                  "max_encoder_length", "piece_chars"},
                 "toy-embedding");
  ToyEmbeddingBackend::Options o;
  o.vocab_size = get_or(p, "vocab_size", o.vocab_size);
  o.dim = get_or(p, "dim", o.dim);
  o.sharpness = get_or(p, "sharpness", o.sharpness);
  o.filler_count = get_or(p, "filler_count", o.filler_count);
  o.filler_prior = get_or(p, "filler_prior", o.filler_prior);
  o.seed = get_or(p, "seed", ctx.seed);
  o.max_encoder_length = get_or(p, "max_encoder_length", o.max_encoder_length);
  o.piece_chars = get_or(p, "piece_chars", o.piece_chars);
  return std::make_unique<ToyEmbeddingBackend>(o);
}

struct Registry {
  std::mutex mu;
  std::map<std::string, BackendFactory> factories{
      {"toy-copy", make_toy_copy},
      {"toy-embedding", make_toy_embedding},
  };
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::vector<std::string> registered_backends() {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  std::vector<std::string> out;
  for (const auto& [name, _] : r.factories) out.push_back(name);
  return out;
}

std::unique_ptr<Backend> make_backend(const std::string& name, const nlohmann::json& params,
                                      const BackendContext& ctx) {
  BackendFactory factory;
  {
    auto& r = registry();
    std::lock_guard<std::mutex> lock(r.mu);
    auto it = r.factories.find(name);
    if (it == r.factories.end()) {
      raise(ErrorCode::kConfig, "unknown backend.name '" + name + "'");
    }
    factory = it->second;
  }
  return factory(params, ctx);
}

BackendContext default_backend_context(std::uint64_t seed) {
  BackendContext ctx;
  ctx.seed = seed;
  if (const char* dir = std::getenv("PREFDIFF_MODEL_CACHE")) ctx.model_cache_dir = dir;
  return ctx;
}

}  // namespace prefdiff
