#include "ombudsman/scanner/service.hpp"

#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ombudsman/annotation/agreement.hpp"
#include "ombudsman/annotation/workflow.hpp"
#include "ombudsman/error.hpp"

using nlohmann::json;

namespace ombudsman::scanner {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kMissingArtifact: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfig: return 400;
    case ErrorCode::kRetriable: return 503;
    default: return 500;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                const std::vector<std::string>& details = {}) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}, {"details", details}}}});
}

std::size_t query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return static_cast<std::size_t>(std::stoull(req.get_param_value(key)));
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("query parameter '") + key + "' must be a number");
  }
}

}  // namespace

struct Service::Impl {
  ServiceContext ctx;
  httplib::Server server;
  std::thread thread;
  std::mutex known_mutex;
  std::set<std::string> known_posts;
  std::map<std::string, const corpus::Post*> annotation_index;

  explicit Impl(ServiceContext c) : ctx(std::move(c)) {
    if (ctx.reports == nullptr || ctx.annotations == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "service needs a report store and an annotation store");
    }
    for (const auto& p : ctx.annotation_posts) annotation_index[p.post_id] = &p;
    refresh_known();
    routes();
  }

  void refresh_known() {
    std::set<std::string> ids;
    for (const auto& p : ctx.annotation_posts) ids.insert(p.post_id);
    for (const auto& id : ctx.reports->ids()) {
      for (const auto& p : ctx.reports->get(id).predictions) ids.insert(p.post_id);
    }
    std::lock_guard lock(known_mutex);
    known_posts = std::move(ids);
  }

  bool is_known(const std::string& post_id) {
    {
      std::lock_guard lock(known_mutex);
      if (known_posts.contains(post_id)) return true;
    }
    refresh_known();
    std::lock_guard lock(known_mutex);
    return known_posts.contains(post_id);
  }

  json labels_of(const std::string& post_id) const {
    json out = json::array();
    for (const auto& r : ctx.annotations->records_for(post_id)) out.push_back(r);
    return out;
  }

  template <typename F>
  auto guarded(F&& handler) {
    return [this, handler = std::forward<F>(handler)](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), to_string(e.code()), e.what(), e.details());
      } catch (const json::exception& e) {
        send_error(res, 400, "parse", e.what());
      } catch (const std::exception& e) {
        spdlog::error("request {} {} failed: {}", req.method, req.path, e.what());
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes() {
    server.Get("/api/scans", guarded([this](const httplib::Request&, httplib::Response& res) {
                 json out = json::array();
                 for (const auto& id : ctx.reports->ids()) {
                   auto r = ctx.reports->get(id);
                   out.push_back({{"id", r.id},
                                  {"created_at", format_utc(r.created_at)},
                                  {"corpus_hash", r.corpus_hash},
                                  {"model_ref", r.model_ref},
                                  {"model_identifier", r.model_identifier},
                                  {"n_positive", r.n_positive},
                                  {"n_negative", r.n_negative},
                                  {"n_errors", r.errors.size()}});
                 }
                 send_json(res, 200, out);
               }));

    server.Get(R"(/api/scans/([^/]+)/report)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, ctx.reports->get(req.matches[1]));
               }));

    server.Get(R"(/api/scans/([^/]+)/queue)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto report = ctx.reports->get(req.matches[1]);
                 std::string state = req.has_param("label_state") ? req.get_param_value("label_state") : "";
                 if (!state.empty() && state != "labeled" && state != "unlabeled") {
                   throw Error(ErrorCode::kInvalidArgument, "label_state must be labeled or unlabeled");
                 }
                 std::optional<corpus::Platform> platform;
                 if (req.has_param("platform")) platform = corpus::parse_platform(req.get_param_value("platform"));
                 auto offset = query_size(req, "offset", 0);
                 auto limit = std::min<std::size_t>(query_size(req, "limit", 50), 500);

                 json items = json::array();
                 std::size_t total = 0;
                 for (const auto& f : report.flagged) {
                   if (platform && f.platform != *platform) continue;
                   auto labels = labels_of(f.post_id);
                   if (state == "labeled" && labels.empty()) continue;
                   if (state == "unlabeled" && !labels.empty()) continue;
                   if (total >= offset && items.size() < limit) {
                     json item = f;
                     item["labels"] = labels;
                     items.push_back(std::move(item));
                   }
                   ++total;
                 }
                 send_json(res, 200,
                           {{"scan_id", report.id}, {"total", total}, {"offset", offset}, {"limit", limit},
                            {"items", items}});
               }));

    server.Get("/api/queue", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 std::string annotator = req.has_param("annotator") ? req.get_param_value("annotator") : "";
                 json items = json::array();
                 for (const auto& p : ctx.annotation_posts) {
                   if (!annotator.empty()) {
                     auto it = ctx.assignments.find(p.post_id);
                     bool assigned = it != ctx.assignments.end() &&
                                     std::find(it->second.begin(), it->second.end(), annotator) != it->second.end();
                     if (!assigned || ctx.annotations->contains(p.post_id, annotator)) continue;
                   }
                   json item = {{"post_id", p.post_id},
                                {"text", p.text},
                                {"platform", corpus::to_string(p.platform)},
                                {"partition", corpus::to_string(p.partition)}};
                   // annotators label blind to their peers
                   if (annotator.empty()) item["labels"] = labels_of(p.post_id);
                   items.push_back(std::move(item));
                 }
                 if (!annotator.empty()) {
                   send_json(res, 200, {{"items", items}, {"disputes", json::array()}});
                   return;
                 }
                 auto records = ctx.annotations->records();
                 auto adjudication = annotation::adjudicate(records, records);
                 json disputes = json::array();
                 for (const auto& id : adjudication.pending) {
                   json experts = json::array();
                   for (const auto& r : ctx.annotations->records_for(id)) {
                     if (r.affiliation == annotation::Affiliation::kExpert) experts.push_back(r);
                   }
                   auto it = annotation_index.find(id);
                   disputes.push_back({{"post_id", id},
                                       {"text", it == annotation_index.end() ? json() : json(it->second->text)},
                                       {"expert_labels", experts}});
                 }
                 send_json(res, 200, {{"items", items}, {"disputes", disputes}});
               }));

    server.Post("/api/labels", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto body = json::parse(req.body);
                  if (!body.contains("noted_at")) body["noted_at"] = format_utc(now_utc());
                  auto record = body.get<annotation::AnnotationRecord>();
                  if (!is_known(record.post_id)) {
                    throw Error(ErrorCode::kNotFound, "unknown post '" + record.post_id + "'");
                  }
                  ctx.annotations->add(record);
                  send_json(res, 201, record);
                }));

    server.Get("/api/agreement", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, 200, annotation::compute_agreement(ctx.annotations->records()));
               }));

    server.Get("/api/adjudications", guarded([this](const httplib::Request&, httplib::Response& res) {
                 auto records = ctx.annotations->records();
                 send_json(res, 200, annotation::adjudicate(records, records));
               }));
  }
};

Service::Service(ServiceContext context) : impl_(std::make_unique<Impl>(std::move(context))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "could not bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "could not bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::listen_blocking(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "could not listen on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ombudsman::scanner
