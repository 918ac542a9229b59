#pragma once

// HTTP facade over the analyses for the annotation UI. Handlers are plain
// functions from request data to a response so they can be exercised
// without a socket; `mount` wires them into an httplib server.

#include <cstddef>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace httplib {
class Server;
}

namespace pf::service {

inline constexpr std::size_t kMiB = 1024 * 1024;

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

struct ImageInfo {
  std::string media_type;  // "image/png" or "image/jpeg"
  int width = 0;
  int height = 0;
};

/// Media type and pixel dimensions from the file header, if recognized.
std::optional<ImageInfo> sniff_image(std::string_view bytes);

struct ImageRecord {
  std::string id;  // hex sha256 of the bytes
  ImageInfo info;
  std::string bytes;
};

/// Content-addressed in-memory store with least-recently-used eviction once
/// the total payload exceeds the capacity. Safe for concurrent use.
class ImageStore {
 public:
  explicit ImageStore(std::size_t capacity_bytes) : capacity_(capacity_bytes) {}

  /// Stores (or refreshes) an image and returns its record.
  ImageRecord put(std::string bytes, const ImageInfo& info);
  std::optional<ImageRecord> get(const std::string& id);

  std::size_t total_bytes() const;
  std::size_t count() const;

 private:
  void evict_locked();

  mutable std::mutex mutex_;
  std::size_t capacity_;
  std::size_t total_ = 0;
  std::list<ImageRecord> entries_;  // most recently used first
  std::unordered_map<std::string, std::list<ImageRecord>::iterator> index_;
};

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string cors_origin;  // empty: no CORS headers
  std::string static_dir;   // empty: no static files
  std::size_t max_document_bytes = 8 * kMiB;
  std::size_t max_image_bytes = 32 * kMiB;
  std::size_t image_store_bytes = 256 * kMiB;
};

/// Flags `--bind`, `--port`, `--cors-origin`, `--static-dir`; environment
/// `PF_BIND`, `PF_PORT`. Flags win over the environment. Throws pf::Error on
/// invalid values; returns nullopt after printing help.
std::optional<ServiceConfig> load_config(
    int argc, const char* const* argv,
    const std::function<const char*(const char*)>& getenv);

class AnalysisService {
 public:
  explicit AnalysisService(ServiceConfig config = {});

  HttpResponse analyze(std::string_view body, std::optional<double> tolerance_px = std::nullopt);
  HttpResponse analyze_partial(std::string_view body);
  HttpResponse upload_image(std::string bytes);
  HttpResponse get_image(const std::string& id);
  HttpResponse health() const;

  const ServiceConfig& config() const { return config_; }
  ImageStore& images() { return images_; }

  void mount(httplib::Server& server);

 private:
  ServiceConfig config_;
  ImageStore images_;
};

}  // namespace pf::service
