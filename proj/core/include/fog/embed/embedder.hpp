/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <Eigen/Core>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "fog/core/types.hpp"

namespace fog::embed {

using Embedding = Eigen::VectorXd;

/// Environment variable consulted for the remote endpoint when the config leaves it empty.
inline constexpr const char* kEndpointEnvVar = "FOG_EMBED_ENDPOINT";

enum class EmbedderKind { kMock, kRemote };

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::kMock;
  std::string endpoint;  // e.g. http://127.0.0.1:8080
  int batch_size = 32;
  double timeout_s = 10.0;
  std::size_t cache_capacity = 4096;  // 0 disables the cache

  /// Throws InvalidArgument for a remote config with no endpoint.
  void validate() const;
};

/// Maps frames and intention texts into a shared vector space.
///
/// Public entry points validate inputs and count requested items; subclasses
/// implement the raw batch calls. Safe for concurrent use.
class Embedder {
 public:
  virtual ~Embedder() = default;

  std::vector<Embedding> embed_images(const std::vector<core::Image>& images);
  /// Same, from image states. Throws InvalidArgument for vector states.
  std::vector<Embedding> embed_states(const std::vector<core::State>& states);
  /// Throws InvalidArgument on empty strings.
  std::vector<Embedding> embed_texts(const std::vector<std::string>& texts);

  Embedding embed_image(const core::Image& image) { return embed_images({image}).front(); }
  Embedding embed_text(const std::string& text) { return embed_texts({text}).front(); }

  /// Number of images passed through embed_images since construction.
  std::uint64_t image_count() const noexcept { return image_count_.load(); }
  std::uint64_t text_count() const noexcept { return text_count_.load(); }

 protected:
  virtual std::vector<Embedding> do_embed_images(const std::vector<core::Image>& images) = 0;
  virtual std::vector<Embedding> do_embed_texts(const std::vector<std::string>& texts) = 0;

 private:
  std::atomic<std::uint64_t> image_count_{0};
  std::atomic<std::uint64_t> text_count_{0};
};

/// Deterministic stand-in: an image embeds as its normalized mean colour, and
/// a small fixed dictionary places colour and posture phrases in the same space.
class MockEmbedder final : public Embedder {
 public:
  static constexpr int kDim = 3;

  static Embedding image_embedding(const core::Image& image);
  static Embedding text_embedding(const std::string& text);

 protected:
  std::vector<Embedding> do_embed_images(const std::vector<core::Image>& images) override;
  std::vector<Embedding> do_embed_texts(const std::vector<std::string>& texts) override;
};

/// Client for an HTTP embedding service:
///   POST {endpoint}/embed  {"kind": "image"|"text", "items": [...]}
///   -> {"embeddings": [[...], ...]}
/// Images travel as base64 PNG. Failed requests are retried 3 times.
class RemoteEmbedder final : public Embedder {
 public:
  static constexpr int kRetries = 3;
  /// First retry delay; doubles on each further attempt.
  static constexpr std::chrono::milliseconds kRetryDelay{100};

  explicit RemoteEmbedder(EmbedderConfig config);

  const std::string& endpoint() const noexcept { return config_.endpoint; }

 protected:
  std::vector<Embedding> do_embed_images(const std::vector<core::Image>& images) override;
  std::vector<Embedding> do_embed_texts(const std::vector<std::string>& texts) override;

 private:
  std::vector<Embedding> post_batch(const std::string& kind, const std::vector<std::string>& items);
  std::vector<Embedding> post(const std::string& kind, const std::vector<std::string>& items);

  EmbedderConfig config_;
  std::string host_;
  std::string base_path_;
  std::mutex mutex_;
};

/// LRU cache keyed by a content hash of each item.
class CachingEmbedder final : public Embedder {
 public:
  CachingEmbedder(std::unique_ptr<Embedder> inner, std::size_t capacity);

  Embedder& inner() noexcept { return *inner_; }
  std::size_t size() const;
  std::uint64_t hits() const noexcept { return hits_.load(); }

 protected:
  std::vector<Embedding> do_embed_images(const std::vector<core::Image>& images) override;
  std::vector<Embedding> do_embed_texts(const std::vector<std::string>& texts) override;

 private:
  template <typename Item, typename Hash, typename Fetch>
  std::vector<Embedding> lookup(const std::vector<Item>& items, Hash hash, Fetch fetch);

  std::unique_ptr<Embedder> inner_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<std::pair<std::uint64_t, Embedding>> lru_;  // front = most recent
  std::unordered_map<std::uint64_t, std::list<std::pair<std::uint64_t, Embedding>>::iterator> index_;
  std::atomic<std::uint64_t> hits_{0};
};

/// Builds the provider described by `config`, wrapped in a cache when enabled.
/// An empty remote endpoint falls back to the FOG_EMBED_ENDPOINT variable.
std::unique_ptr<Embedder> make_embedder(EmbedderConfig config);

/// Cosine similarity clamped to [-1, 1]. Throws InvalidArgument on a length
/// mismatch or a zero vector.
double cosine(const Embedding& u, const Embedding& v);

}  // namespace fog::embed
