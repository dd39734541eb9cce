#pragma once

// Embedding backend adapter for an out-of-process encoder served over HTTP.
//
// Request:  POST <base_url>/embed, JSON body
//   text:   {"backend_id", "modality": "TEXT", "text"}
//   visual: {"backend_id", "modality": "VISUAL", "height", "width",
//            "pixels_base64"}   (RGB, 8-bit, row-major HWC)
// Response: {"embedding": [float, ...]} with exactly descriptor.dim values.
// A bearer token is read from the environment variable named by
// credentials_env, if any; it is never stored in configs.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "vidrisk/embedding.hpp"
#include "vidrisk/error.hpp"

namespace vidrisk {

struct HttpBackendOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string credentials_env;
  int timeout_seconds = 30;
};

class HttpBackend final : public EmbeddingBackend {
 public:
  HttpBackend(BackendDescriptor descriptor, HttpBackendOptions options)
      : descriptor_(std::move(descriptor)), options_(std::move(options)) {
    if (descriptor_.dim == 0) fail(ErrorCode::kConfig, "backend '" + descriptor_.backend_id + "' needs dim > 0");
    if (options_.base_url.empty()) fail(ErrorCode::kConfig, "backend '" + descriptor_.backend_id + "' needs a url");
  }

  const BackendDescriptor& descriptor() const override { return descriptor_; }

  std::vector<float> encode_image(const RawImage& image, const EncodeContext& ctx) const override {
    if (descriptor_.modality != Modality::kVisual) return EmbeddingBackend::encode_image(image, ctx);
    const std::string pixels(image.pixels.begin(), image.pixels.end());
    return post({{"backend_id", descriptor_.backend_id},
                 {"modality", "VISUAL"},
                 {"height", image.height},
                 {"width", image.width},
                 {"pixels_base64", httplib::detail::base64_encode(pixels)}});
  }

  std::vector<float> encode_text(std::string_view text, const EncodeContext& ctx) const override {
    if (descriptor_.modality != Modality::kText) return EmbeddingBackend::encode_text(text, ctx);
    return post({{"backend_id", descriptor_.backend_id}, {"modality", "TEXT"}, {"text", text}});
  }

  /// Cheap reachability probe (GET <base_url>/health).
  bool reachable() const {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    auto res = client.Get("/health");
    return res && res->status == 200;
  }

 private:
  std::vector<float> post(const nlohmann::json& body) const {
    httplib::Client client(options_.base_url);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!options_.credentials_env.empty()) {
      if (const char* token = std::getenv(options_.credentials_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }
    auto res = client.Post("/embed", headers, body.dump(), "application/json");
    if (!res) {
      fail(ErrorCode::kBackendUnreachable, "backend '" + descriptor_.backend_id + "' unreachable at " +
                                               options_.base_url + " (" + httplib::to_string(res.error()) + ")");
    }
    if (res->status != 200) {
      fail(ErrorCode::kBackendFailure, "backend '" + descriptor_.backend_id + "' returned HTTP " +
                                           std::to_string(res->status));
    }
    try {
      return nlohmann::json::parse(res->body).at("embedding").get<std::vector<float>>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kBackendFailure,
           "backend '" + descriptor_.backend_id + "' sent a malformed response: " + e.what());
    }
  }

  BackendDescriptor descriptor_;
  HttpBackendOptions options_;
};

}  // namespace vidrisk
