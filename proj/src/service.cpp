#include "pf/service.hpp"

#include <charconv>
#include <cstdint>

#include <CLI11.hpp>
#include <httplib.h>

#include "pf/analysis.hpp"
#include "pf/errors.hpp"

namespace pf::service {

namespace {

std::uint32_t be32(std::string_view b, std::size_t at) {
  return (std::uint32_t(std::uint8_t(b[at])) << 24) | (std::uint32_t(std::uint8_t(b[at + 1])) << 16) |
         (std::uint32_t(std::uint8_t(b[at + 2])) << 8) | std::uint32_t(std::uint8_t(b[at + 3]));
}

std::uint16_t be16(std::string_view b, std::size_t at) {
  return std::uint16_t((std::uint8_t(b[at]) << 8) | std::uint8_t(b[at + 1]));
}

std::optional<ImageInfo> sniff_png(std::string_view b) {
  static constexpr std::string_view kSignature("\x89PNG\r\n\x1a\n", 8);
  if (b.size() < 24 || b.substr(0, 8) != kSignature || b.substr(12, 4) != "IHDR") {
    return std::nullopt;
  }
  const auto w = be32(b, 16), h = be32(b, 20);
  if (w == 0 || h == 0 || w > 0x7fffffff || h > 0x7fffffff) return std::nullopt;
  return ImageInfo{"image/png", int(w), int(h)};
}

bool is_sof(std::uint8_t marker) {
  return marker >= 0xc0 && marker <= 0xcf && marker != 0xc4 && marker != 0xc8 && marker != 0xcc;
}

std::optional<ImageInfo> sniff_jpeg(std::string_view b) {
  if (b.size() < 4 || std::uint8_t(b[0]) != 0xff || std::uint8_t(b[1]) != 0xd8) return std::nullopt;
  std::size_t i = 2;
  while (i + 4 <= b.size()) {
    if (std::uint8_t(b[i]) != 0xff) return std::nullopt;
    std::uint8_t marker = std::uint8_t(b[i + 1]);
    if (marker == 0xff) {  // fill byte
      ++i;
      continue;
    }
    if (marker == 0x01 || (marker >= 0xd0 && marker <= 0xd7)) {
      i += 2;
      continue;
    }
    if (marker == 0xd9 || marker == 0xda) return std::nullopt;  // no frame header before scan
    const std::size_t length = be16(b, i + 2);
    if (length < 2) return std::nullopt;
    if (is_sof(marker)) {
      if (i + 9 > b.size()) return std::nullopt;
      const int h = be16(b, i + 5), w = be16(b, i + 7);
      if (w == 0 || h == 0) return std::nullopt;
      return ImageInfo{"image/jpeg", w, h};
    }
    i += 2 + length;
  }
  return std::nullopt;
}

HttpResponse json_response(int status, const Json& j) {
  return {status, "application/json", write_canonical(j)};
}

HttpResponse error_response(int status, const std::string& kind, const std::string& message,
                            Json extra = Json::object()) {
  extra["kind"] = kind;
  extra["message"] = message;
  return json_response(status, {{"error", extra}});
}

// Maps document errors to 400 responses; anything else is a server fault.
template <typename F>
HttpResponse guarded(F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    return error_response(400, "ParseError", e.what(),
                          {{"line", e.line()}, {"column", e.column()}});
  } catch (const SchemaError& e) {
    return error_response(400, "SchemaError", e.what(), {{"field", e.field()}});
  } catch (const ValidationError& e) {
    return error_response(400, "ValidationError", e.what(), {{"field", e.field()}});
  } catch (const Error& e) {
    return error_response(400, "AnalysisError", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

Json parse_body(std::string_view body) {
  try {
    return Json::parse(body.begin(), body.end());
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, e.byte);
  }
}

HttpResponse insufficient(const std::string& kind, std::size_t have, std::size_t need) {
  const InsufficientConstraints e(have, need);
  return json_response(200, {{"kind", kind},
                             {"status", "insufficient-constraints"},
                             {"need", need},
                             {"have", have},
                             {"message", e.what()}});
}

constexpr std::array kPartialKinds{"vanishing-points", "vanishing-line", "shadows",
                                   "reflections"};

}  // namespace

std::optional<ImageInfo> sniff_image(std::string_view bytes) {
  if (auto png = sniff_png(bytes)) return png;
  return sniff_jpeg(bytes);
}

ImageRecord ImageStore::put(std::string bytes, const ImageInfo& info) {
  ImageRecord record{sha256_hex(bytes), info, std::move(bytes)};
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(record.id); it != index_.end()) {
    entries_.splice(entries_.begin(), entries_, it->second);
    return *it->second;
  }
  total_ += record.bytes.size();
  entries_.push_front(record);
  index_[record.id] = entries_.begin();
  evict_locked();
  return record;
}

std::optional<ImageRecord> ImageStore::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  entries_.splice(entries_.begin(), entries_, it->second);
  return *it->second;
}

void ImageStore::evict_locked() {
  // The newest entry always stays, even when it alone exceeds the capacity.
  while (total_ > capacity_ && entries_.size() > 1) {
    const auto& victim = entries_.back();
    total_ -= victim.bytes.size();
    index_.erase(victim.id);
    entries_.pop_back();
  }
}

std::size_t ImageStore::total_bytes() const {
  std::lock_guard lock(mutex_);
  return total_;
}

std::size_t ImageStore::count() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::optional<ServiceConfig> load_config(
    int argc, const char* const* argv,
    const std::function<const char*(const char*)>& getenv) {
  ServiceConfig config;
  if (const char* bind = getenv("PF_BIND"); bind && *bind) config.bind = bind;
  if (const char* port = getenv("PF_PORT"); port && *port) {
    int value = 0;
    const std::string_view s(port);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size() || value < 0 || value > 65535) {
      throw Error("PF_PORT must be a port number, got '" + std::string(s) + "'");
    }
    config.port = value;
  }

  CLI::App app{"HTTP analysis service", "pf_serve"};
  app.add_option("--bind", config.bind, "Bind address (env PF_BIND)");
  app.add_option("--port", config.port, "Port (env PF_PORT)")->check(CLI::Range(0, 65535));
  app.add_option("--cors-origin", config.cors_origin, "Origin allowed for cross-site requests");
  app.add_option("--static-dir", config.static_dir, "Directory served at /")
      ->check(CLI::ExistingDirectory);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw Error(e.what());
  }
  return config;
}

AnalysisService::AnalysisService(ServiceConfig config)
    : config_(std::move(config)), images_(config_.image_store_bytes) {}

HttpResponse AnalysisService::analyze(std::string_view body, std::optional<double> tolerance_px) {
  if (body.size() > config_.max_document_bytes) {
    return error_response(413, "PayloadTooLarge", "document exceeds the size limit");
  }
  return guarded([&] {
    const auto doc = parse_annotations(body);
    return HttpResponse{200, "application/json", write_report(analyze_document(doc, tolerance_px))};
  });
}

HttpResponse AnalysisService::analyze_partial(std::string_view body) {
  if (body.size() > config_.max_document_bytes) {
    return error_response(413, "PayloadTooLarge", "request exceeds the size limit");
  }
  return guarded([&]() -> HttpResponse {
    const Json req = parse_body(body);
    if (!req.is_object()) throw SchemaError("$", "expected an object");
    for (auto it = req.begin(); it != req.end(); ++it) {
      static const std::set<std::string> allowed{"kind",         "tolerance_px", "image_size",
                                                 "segments",     "line_groups",  "shadow_pairs",
                                                 "reflection_pairs"};
      if (!allowed.contains(it.key())) throw SchemaError(it.key(), "unknown field");
    }
    if (!req.contains("kind") || !req["kind"].is_string()) {
      throw SchemaError("kind", "expected one of vanishing-points, vanishing-line, shadows, reflections");
    }
    const std::string kind = req["kind"].get<std::string>();
    if (std::find(kPartialKinds.begin(), kPartialKinds.end(), kind) == kPartialKinds.end()) {
      throw SchemaError("kind", "unknown analysis kind '" + kind + "'");
    }

    // Reuse the document reader for validation of the constraint payload.
    Json doc_json = {{"schema_version", kSchemaVersion}, {"image_ref", ""}};
    const bool has_size = req.contains("image_size");
    doc_json["image_size"] =
        has_size ? req["image_size"] : Json{{"width", 1 << 16}, {"height", 1 << 16}};
    if (req.contains("tolerance_px")) doc_json["tolerance_px"] = req["tolerance_px"];
    if (kind == "vanishing-points") {
      if (req.contains("segments")) {
        doc_json["line_groups"] = Json::array({{{"id", "segments"}, {"segments", req["segments"]}}});
      } else {
        throw SchemaError("segments", "missing required field");
      }
    } else if (kind == "vanishing-line") {
      if (!req.contains("line_groups")) throw SchemaError("line_groups", "missing required field");
      doc_json["line_groups"] = req["line_groups"];
    } else if (kind == "shadows") {
      if (!req.contains("shadow_pairs")) throw SchemaError("shadow_pairs", "missing required field");
      doc_json["shadow_pairs"] = req["shadow_pairs"];
    } else {
      if (!req.contains("reflection_pairs")) {
        throw SchemaError("reflection_pairs", "missing required field");
      }
      doc_json["reflection_pairs"] = req["reflection_pairs"];
    }
    AnnotationDocument doc = parse_annotations(doc_json.dump());
    const double tol = doc.tolerance_px.value_or(kDefaultTolerancePx);

    Json result;
    if (kind == "vanishing-points") {
      const auto& segs = doc.line_groups.front().segments;
      if (segs.size() < 2) return insufficient(kind, segs.size(), 2);
      const auto est = estimate_vanishing_point(segs);
      result = {{"estimate", to_json(est)}, {"verdict", to_json(vanishing_point_verdict(est, tol))}};
    } else if (kind == "vanishing-line") {
      // All submitted groups are treated as one plane.
      std::size_t usable = 0;
      for (auto& g : doc.line_groups) {
        g.plane_group = "plane";
        if (g.role == GroupRole::reference && g.segments.size() >= 2) ++usable;
      }
      if (usable < 2) return insufficient(kind, usable, 2);
      const auto report = analyze_document(doc, tol);
      const Json full = report_to_json(report);
      result = {{"vanishing_points", full["vanishing_points"]},
                {"vanishing_line", full["vanishing_lines"].empty() ? Json()
                                                                   : full["vanishing_lines"][0]},
                {"on_line", full["on_line"]}};
    } else if (kind == "shadows") {
      if (doc.shadow_pairs.size() < 2) return insufficient(kind, doc.shadow_pairs.size(), 2);
      std::optional<double> height;
      if (has_size) height = doc.image_size.height;
      result = to_json(analyze_shadows(doc.shadow_pairs, tol, height));
    } else {
      if (doc.reflection_pairs.size() < 2) {
        return insufficient(kind, doc.reflection_pairs.size(), 2);
      }
      result = to_json(analyze_reflections(doc.reflection_pairs, tol));
    }
    return json_response(200, {{"kind", kind},
                               {"status", "ok"},
                               {"tolerance_px", number_to_json(tol)},
                               {"result", result}});
  });
}

HttpResponse AnalysisService::upload_image(std::string bytes) {
  if (bytes.size() > config_.max_image_bytes) {
    return error_response(413, "PayloadTooLarge", "image exceeds the size limit");
  }
  const auto info = sniff_image(bytes);
  if (!info) {
    return error_response(415, "UnsupportedMediaType", "expected a PNG or JPEG image");
  }
  const auto record = images_.put(std::move(bytes), *info);
  return json_response(200, {{"id", record.id},
                             {"media_type", record.info.media_type},
                             {"width", record.info.width},
                             {"height", record.info.height}});
}

HttpResponse AnalysisService::get_image(const std::string& id) {
  const auto record = images_.get(id);
  if (!record) return error_response(404, "NotFound", "unknown image id '" + id + "'");
  return {200, record->info.media_type, record->bytes};
}

HttpResponse AnalysisService::health() const {
  return json_response(200, {{"status", "ok"}, {"version", tool_version()}});
}

void AnalysisService::mount(httplib::Server& server) {
  server.set_payload_max_length(std::max(config_.max_image_bytes, config_.max_document_bytes) + 1);

  auto send = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };

  server.Post("/api/analyze", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<double> tol;
    if (req.has_param("tolerance_px")) {
      const std::string s = req.get_param_value("tolerance_px");
      double value = 0.0;
      const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || end != s.data() + s.size() || !(value > 0.0)) {
        send(res, error_response(400, "ValidationError", "tolerance_px must be a positive number",
                                 {{"field", "tolerance_px"}}));
        return;
      }
      tol = value;
    }
    send(res, analyze(req.body, tol));
  });
  server.Post("/api/analyze/partial",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, analyze_partial(req.body));
              });
  server.Post("/api/images", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, upload_image(req.body));
  });
  server.Get(R"(/api/images/([0-9A-Za-z]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, get_image(req.matches[1]));
             });
  server.Get("/api/health", [this, send](const httplib::Request&, httplib::Response& res) {
    send(res, health());
  });

  if (!config_.cors_origin.empty()) {
    const std::string origin = config_.cors_origin;
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    });
    server.Options(R"(/api/.*)", [origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
  if (!config_.static_dir.empty()) server.set_mount_point("/", config_.static_dir);

  // Requests rejected by the transport limit still get a JSON body.
  server.set_error_handler([send](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 413) {
      send(res, error_response(413, "PayloadTooLarge", "request exceeds the size limit"));
    } else if (res.status == 404) {
      send(res, error_response(404, "NotFound", "no such resource"));
    }
  });
}

}  // namespace pf::service
