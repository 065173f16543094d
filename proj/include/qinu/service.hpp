#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "qinu/corpus.hpp"
#include "qinu/text_pipeline.hpp"

namespace qinu {

struct ApiRequest {
  std::string method;  // "GET" or "POST"
  std::string path;    // without the query string
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lookup is case-insensitive via header()
  std::string body;

  std::optional<std::string> header(const std::string& name) const;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Transport-free request handling for the annotation API. Reads work on
/// store snapshots; mutations go through the store's writer lock. Store
/// errors map to 4xx responses, never 5xx.
class AnnotationApi {
 public:
  AnnotationApi(ProjectStore& store, PipelineConfig pipeline, std::size_t max_tokens = 60,
                std::optional<std::filesystem::path> static_dir = std::nullopt);

  ApiResponse handle(const ApiRequest& req) const;

 private:
  ApiResponse progress() const;
  ApiResponse sentences(const ApiRequest& req) const;
  ApiResponse post_annotation(const ApiRequest& req) const;
  ApiResponse split(const std::string& id, const ApiRequest& req) const;
  ApiResponse review(const std::string& id) const;
  ApiResponse static_file(const std::string& path) const;

  ProjectStore& store_;
  PipelineConfig pipeline_;
  std::size_t max_tokens_;
  std::optional<std::filesystem::path> static_dir_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end over AnnotationApi. The constructor binds the socket and
/// throws IoError when the port is taken.
class AnnotationService {
 public:
  AnnotationService(ProjectStore& store, PipelineConfig pipeline, std::size_t max_tokens,
                    ServiceOptions options);
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  int port() const;
  /// Blocks serving requests until stop() is called from another thread.
  void run();
  /// Stops accepting requests and waits for in-flight handlers.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qinu
