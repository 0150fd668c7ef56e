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

#include "fog/embed/embedder.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>
#include <unordered_map>

#include "fog/core/binary_io.hpp"
#include "fog/core/errors.hpp"
#include "fog/core/image_io.hpp"

namespace fog::embed {

namespace {

Embedding checked(Embedding e, const char* who) {
  if (e.size() == 0 || !e.allFinite() || e.squaredNorm() == 0.0) {
    throw InvalidArgument(std::string(who) + " produced an empty, zero or non-finite embedding");
  }
  return e;
}

const std::unordered_map<std::string, Embedding>& dictionary() {
  static const std::unordered_map<std::string, Embedding> dict = [] {
    std::unordered_map<std::string, Embedding> d;
    d["ground is blue"] = Eigen::Vector3d(0, 0, 1);
    d["ground is orange"] = Eigen::Vector3d(1, 0.5, 0).normalized();
    d["agent flips over"] = Eigen::Vector3d(1, 0, 0);
    d["agent stands normally"] = Eigen::Vector3d(0, 1, 0);
    return d;
  }();
  return dict;
}

}  // namespace

void EmbedderConfig::validate() const {
  if (kind == EmbedderKind::kRemote && endpoint.empty()) {
    throw InvalidArgument("remote embedder requires an endpoint (config or " + std::string(kEndpointEnvVar) + ")");
  }
  if (batch_size < 1) throw InvalidArgument("embedder batch_size must be >= 1");
  if (!(timeout_s > 0.0)) throw InvalidArgument("embedder timeout must be positive");
}

// ---------------------------------------------------------------------------
// Embedder

std::vector<Embedding> Embedder::embed_images(const std::vector<core::Image>& images) {
  for (const auto& img : images) {
    if (img.bytes().size() != core::Image::kBytes) throw InvalidArgument("images must be 64x64x3");
  }
  image_count_ += images.size();
  auto out = do_embed_images(images);
  if (out.size() != images.size()) throw InvalidArgument("embedder returned the wrong number of embeddings");
  return out;
}

std::vector<Embedding> Embedder::embed_states(const std::vector<core::State>& states) {
  std::vector<core::Image> images;
  images.reserve(states.size());
  for (const auto& s : states) {
    if (!s.is_image()) throw InvalidArgument("embed_states needs image states");
    images.push_back(s.img());
  }
  return embed_images(images);
}

std::vector<Embedding> Embedder::embed_texts(const std::vector<std::string>& texts) {
  for (const auto& t : texts) {
    if (t.empty()) throw InvalidArgument("cannot embed an empty string");
  }
  text_count_ += texts.size();
  auto out = do_embed_texts(texts);
  if (out.size() != texts.size()) throw InvalidArgument("embedder returned the wrong number of embeddings");
  return out;
}

// ---------------------------------------------------------------------------
// MockEmbedder

Embedding MockEmbedder::image_embedding(const core::Image& image) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  const auto& px = image.bytes();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    sum[0] += px[i];
    sum[1] += px[i + 1];
    sum[2] += px[i + 2];
  }
  if (sum.squaredNorm() == 0.0) throw InvalidArgument("mock embedder: all-black image has no direction");
  return Embedding(sum.normalized());
}

Embedding MockEmbedder::text_embedding(const std::string& text) {
  if (text.empty()) throw InvalidArgument("cannot embed an empty string");
  const auto& dict = dictionary();
  if (auto it = dict.find(text); it != dict.end()) return it->second;
  core::Rng rng(core::fnv1a(text));
  Embedding e(kDim);
  do {
    for (int i = 0; i < kDim; ++i) e[i] = rng.normal();
  } while (e.squaredNorm() < 1e-12);
  return e.normalized();
}

std::vector<Embedding> MockEmbedder::do_embed_images(const std::vector<core::Image>& images) {
  std::vector<Embedding> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(image_embedding(img));
  return out;
}

std::vector<Embedding> MockEmbedder::do_embed_texts(const std::vector<std::string>& texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(text_embedding(t));
  return out;
}

// ---------------------------------------------------------------------------
// RemoteEmbedder

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)) {
  config_.kind = EmbedderKind::kRemote;
  config_.validate();
  // Split "scheme://host[:port][/base]" into the client address and a path prefix.
  const std::string& ep = config_.endpoint;
  const auto scheme_end = ep.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  if (scheme_end != std::string::npos && ep.substr(0, scheme_end) != "http") {
    throw InvalidArgument("remote embedder supports plain http endpoints only: " + ep);
  }
  const auto path_start = ep.find('/', host_start);
  host_ = "http://" + ep.substr(host_start, path_start == std::string::npos ? std::string::npos : path_start - host_start);
  base_path_ = path_start == std::string::npos ? "" : ep.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

std::vector<Embedding> RemoteEmbedder::post_batch(const std::string& kind, const std::vector<std::string>& items) {
  std::lock_guard lock(mutex_);
  httplib::Client client(host_);
  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const std::string body = nlohmann::json{{"kind", kind}, {"items", items}}.dump();
  auto res = client.Post(base_path_ + "/embed", body, "application/json");
  if (!res) {
    throw TransportError("embedding request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()),
                         true);
  }
  if (res->status != 200) {
    throw TransportError("embedding service returned HTTP " + std::to_string(res->status), res->status >= 500);
  }
  std::vector<Embedding> out;
  try {
    const auto j = nlohmann::json::parse(res->body);
    for (const auto& row : j.at("embeddings")) {
      const auto vals = row.get<std::vector<double>>();
      out.push_back(checked(Eigen::Map<const Embedding>(vals.data(), static_cast<Eigen::Index>(vals.size())),
                            "remote embedder"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed embedding response: ") + e.what(), false);
  }
  if (out.size() != items.size()) {
    throw TransportError("embedding service returned " + std::to_string(out.size()) + " rows for " +
                             std::to_string(items.size()) + " items",
                         false);
  }
  return out;
}

std::vector<Embedding> RemoteEmbedder::post(const std::string& kind, const std::vector<std::string>& items) {
  std::vector<Embedding> out;
  out.reserve(items.size());
  for (std::size_t start = 0; start < items.size(); start += static_cast<std::size_t>(config_.batch_size)) {
    const auto end = std::min(items.size(), start + static_cast<std::size_t>(config_.batch_size));
    const std::vector<std::string> batch(items.begin() + static_cast<std::ptrdiff_t>(start),
                                         items.begin() + static_cast<std::ptrdiff_t>(end));
    for (int attempt = 0;; ++attempt) {
      try {
        auto rows = post_batch(kind, batch);
        out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
        break;
      } catch (const TransportError& e) {
        if (!e.retriable() || attempt >= kRetries) throw;
        std::this_thread::sleep_for(kRetryDelay * (1 << attempt));
      }
    }
  }
  return out;
}

std::vector<Embedding> RemoteEmbedder::do_embed_images(const std::vector<core::Image>& images) {
  std::vector<std::string> items;
  items.reserve(images.size());
  for (const auto& img : images) items.push_back(core::base64_encode(core::encode_png(img)));
  return post("image", items);
}

std::vector<Embedding> RemoteEmbedder::do_embed_texts(const std::vector<std::string>& texts) {
  return post("text", texts);
}

// ---------------------------------------------------------------------------
// CachingEmbedder

CachingEmbedder::CachingEmbedder(std::unique_ptr<Embedder> inner, std::size_t capacity)
    : inner_(std::move(inner)), capacity_(capacity) {
  if (!inner_) throw InvalidArgument("CachingEmbedder needs an inner embedder");
}

std::size_t CachingEmbedder::size() const {
  std::lock_guard lock(mutex_);
  return lru_.size();
}

template <typename Item, typename Hash, typename Fetch>
std::vector<Embedding> CachingEmbedder::lookup(const std::vector<Item>& items, Hash hash, Fetch fetch) {
  std::vector<Embedding> out(items.size());
  // Misses are fetched once per distinct key; slot[i] is the fetch row for item i.
  std::vector<Item> missing;
  std::vector<std::uint64_t> missing_keys;
  std::unordered_map<std::uint64_t, std::size_t> missing_row;
  std::vector<std::ptrdiff_t> slot(items.size(), -1);
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::uint64_t key = hash(items[i]);
      if (auto it = index_.find(key); it != index_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        out[i] = it->second->second;
        ++hits_;
      } else if (auto m = missing_row.find(key); m != missing_row.end()) {
        slot[i] = static_cast<std::ptrdiff_t>(m->second);
        ++hits_;
      } else {
        missing_row.emplace(key, missing.size());
        slot[i] = static_cast<std::ptrdiff_t>(missing.size());
        missing.push_back(items[i]);
        missing_keys.push_back(key);
      }
    }
  }
  if (missing.empty()) return out;
  const auto fresh = fetch(missing);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (slot[i] >= 0) out[i] = fresh[static_cast<std::size_t>(slot[i])];
  }
  if (capacity_ == 0) return out;
  std::lock_guard lock(mutex_);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    if (index_.count(missing_keys[j])) continue;
    lru_.emplace_front(missing_keys[j], fresh[j]);
    index_[missing_keys[j]] = lru_.begin();
    if (lru_.size() > capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }
  return out;
}

std::vector<Embedding> CachingEmbedder::do_embed_images(const std::vector<core::Image>& images) {
  return lookup(
      images,
      [](const core::Image& img) {
        return core::fnv1a(img.bytes().data(), img.bytes().size(), core::fnv1a("image:"));
      },
      [this](const std::vector<core::Image>& miss) { return inner_->embed_images(miss); });
}

std::vector<Embedding> CachingEmbedder::do_embed_texts(const std::vector<std::string>& texts) {
  return lookup(
      texts,
      [](const std::string& t) { return core::fnv1a(t.data(), t.size(), core::fnv1a("text:")); },
      [this](const std::vector<std::string>& miss) { return inner_->embed_texts(miss); });
}

// ---------------------------------------------------------------------------

std::unique_ptr<Embedder> make_embedder(EmbedderConfig config) {
  std::unique_ptr<Embedder> base;
  if (config.kind == EmbedderKind::kRemote) {
    if (config.endpoint.empty()) {
      if (const char* env = std::getenv(kEndpointEnvVar)) config.endpoint = env;
    }
    base = std::make_unique<RemoteEmbedder>(config);
  } else {
    base = std::make_unique<MockEmbedder>();
  }
  if (config.cache_capacity == 0) return base;
  return std::make_unique<CachingEmbedder>(std::move(base), config.cache_capacity);
}

double cosine(const Embedding& u, const Embedding& v) {
  if (u.size() != v.size()) throw InvalidArgument("cosine: embeddings differ in length");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw InvalidArgument("cosine: zero vector");
  if (!std::isfinite(nu) || !std::isfinite(nv)) throw InvalidArgument("cosine: non-finite vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

}  // namespace fog::embed
