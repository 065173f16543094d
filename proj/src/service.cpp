#include "qinu/service.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace qinu {

using nlohmann::json;

namespace {

ApiResponse json_response(int status, const json& j) { return {status, "application/json", j.dump()}; }

ApiResponse error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

json sentence_entry(const StoreSnapshot& snap, const Sentence& s, const PipelineConfig& pipeline) {
  const Review* r = snap.find_review(s.review_id);
  return json{{"sentence", s},
              {"tokens", tokenize(s.text, pipeline)},
              {"annotated", snap.is_annotated(s.sentence_id)},
              {"review", r ? json(*r) : json(nullptr)}};
}

const char* kPlaceholder =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>qinu annotation service</title></head>"
    "<body><h1>qinu annotation service</h1><p>No UI assets are installed. The JSON API lives under "
    "<code>/api/</code>: <code>GET /api/progress</code>, <code>GET /api/sentences</code>, "
    "<code>POST /api/annotations</code>, <code>POST /api/sentences/{id}/split</code>, "
    "<code>GET /api/reviews/{id}</code>.</p></body></html>";

std::string mime_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

}  // namespace

std::optional<std::string> ApiRequest::header(const std::string& name) const {
  const std::string want = lower(name);
  for (const auto& [k, v] : headers) {
    if (lower(k) == want) return v;
  }
  return std::nullopt;
}

AnnotationApi::AnnotationApi(ProjectStore& store, PipelineConfig pipeline, std::size_t max_tokens,
                             std::optional<std::filesystem::path> static_dir)
    : store_(store), pipeline_(std::move(pipeline)), max_tokens_(max_tokens), static_dir_(std::move(static_dir)) {}

ApiResponse AnnotationApi::handle(const ApiRequest& req) const {
  try {
    const std::string& p = req.path;
    if (p == "/api/progress" && req.method == "GET") return progress();
    if (p == "/api/sentences" && req.method == "GET") return sentences(req);
    if (p == "/api/annotations" && req.method == "POST") return post_annotation(req);
    const std::string sentences_prefix = "/api/sentences/";
    if (p.starts_with(sentences_prefix) && p.ends_with("/split") && req.method == "POST") {
      const std::string id = p.substr(sentences_prefix.size(), p.size() - sentences_prefix.size() - 6);
      return split(id, req);
    }
    const std::string reviews_prefix = "/api/reviews/";
    if (p.starts_with(reviews_prefix) && req.method == "GET") return review(p.substr(reviews_prefix.size()));
    if (p.starts_with("/api/")) return error_response(404, "no such endpoint: " + req.method + " " + p);
    if (req.method == "GET") return static_file(p);
    return error_response(405, "method not allowed");
  } catch (const json::exception& e) {
    return error_response(400, std::string("malformed JSON: ") + e.what());
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const ConflictError& e) {
    return error_response(409, e.what());
  } catch (const UsageError& e) {
    return error_response(400, e.what());
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
}

ApiResponse AnnotationApi::progress() const {
  const auto snap = store_.snapshot();
  return json_response(200, json{{"total", snap->sentences().size()}, {"annotated", snap->annotated_sentence_count()}});
}

ApiResponse AnnotationApi::sentences(const ApiRequest& req) const {
  std::string status = "unannotated";
  if (auto it = req.query.find("status"); it != req.query.end()) status = it->second;
  if (status != "unannotated" && status != "all")
    return error_response(400, "status must be 'unannotated' or 'all'");
  std::size_t limit = std::numeric_limits<std::size_t>::max();
  if (auto it = req.query.find("limit"); it != req.query.end()) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(it->second, &used);
      if (used != it->second.size() || v < 0) throw std::invalid_argument(it->second);
      limit = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      return error_response(400, "limit must be a non-negative integer");
    }
  }
  const auto snap = store_.snapshot();
  json out = json::array();
  for (const Sentence& s : snap->sentences()) {
    if (out.size() >= limit) break;
    if (status == "unannotated" && snap->is_annotated(s.sentence_id)) continue;
    out.push_back(sentence_entry(*snap, s, pipeline_));
  }
  return json_response(200, json{{"sentences", std::move(out)}});
}

ApiResponse AnnotationApi::post_annotation(const ApiRequest& req) const {
  const json body = json::parse(req.body);
  Annotation a = body.get<Annotation>();
  if (auto who = req.header("X-Annotator")) {
    if (!a.annotator_id.empty() && a.annotator_id != *who)
      return error_response(422, "annotator_id in body disagrees with the X-Annotator header");
    a.annotator_id = *who;
  }
  try {
    const Annotation stored = record_annotation(a, store_, pipeline_);
    return json_response(201, json(stored));
  } catch (const NotFoundError& e) {
    return error_response(422, e.what());
  }
}

ApiResponse AnnotationApi::split(const std::string& id, const ApiRequest& req) const {
  const json body = json::parse(req.body);
  if (!body.is_object() || !body.contains("char_offset") || !body.at("char_offset").is_number_unsigned())
    return error_response(422, "body must be {\"char_offset\": non-negative integer}");
  const auto offset = body.at("char_offset").get<std::size_t>();
  const auto [first, second] = split_sentence(store_, id, offset, max_tokens_);
  return json_response(200, json{{"first", first}, {"second", second}});
}

ApiResponse AnnotationApi::review(const std::string& id) const {
  const auto snap = store_.snapshot();
  const Review* r = snap->find_review(id);
  if (!r) return error_response(404, "unknown review " + id);
  json sentences = json::array();
  for (const Sentence* s : snap->sentences_of(id)) sentences.push_back(*s);
  return json_response(200, json{{"review", *r}, {"sentences", std::move(sentences)}});
}

ApiResponse AnnotationApi::static_file(const std::string& path) const {
  if (!static_dir_) {
    if (path == "/" || path == "/index.html") return {200, "text/html; charset=utf-8", kPlaceholder};
    return error_response(404, "not found");
  }
  if (path.find("..") != std::string::npos) return error_response(404, "not found");
  std::filesystem::path file = *static_dir_ / (path == "/" ? std::string("index.html") : path.substr(1));
  std::ifstream in(file, std::ios::binary);
  if (!in) return error_response(404, "not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return {200, mime_for(file), ss.str()};
}

struct AnnotationService::Impl {
  AnnotationApi api;
  httplib::Server server;
  int port = 0;

  Impl(ProjectStore& store, PipelineConfig pipeline, std::size_t max_tokens, std::optional<std::filesystem::path> dir)
      : api(store, std::move(pipeline), max_tokens, std::move(dir)) {}
};

AnnotationService::AnnotationService(ProjectStore& store, PipelineConfig pipeline, std::size_t max_tokens,
                                     ServiceOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(pipeline), max_tokens, options.static_dir)) {
  auto handler = [this](const httplib::Request& hreq, httplib::Response& hres) {
    ApiRequest req;
    req.method = hreq.method;
    req.path = hreq.path;
    for (const auto& [k, v] : hreq.params) req.query.emplace(k, v);
    for (const auto& [k, v] : hreq.headers) req.headers.emplace(k, v);
    req.body = hreq.body;
    const ApiResponse res = impl_->api.handle(req);
    hres.status = res.status;
    hres.set_content(res.body, res.content_type);
  };
  // httplib's default sets SO_REUSEPORT, which would let a second service
  // share a port that is already taken.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  if (options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(options.host);
  } else if (impl_->server.bind_to_port(options.host, options.port)) {
    impl_->port = options.port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port <= 0)
    throw IoError("cannot listen on " + options.host + ":" + std::to_string(options.port) +
                  " (port in use?); pass a different --port");
}

AnnotationService::~AnnotationService() { stop(); }

int AnnotationService::port() const { return impl_->port; }

void AnnotationService::run() { impl_->server.listen_after_bind(); }

void AnnotationService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace qinu
