// Copyright 2026 The editintent Authors.
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

#include <string>

#include "editintent/annotation_service.h"
#include "httplib.h"

namespace editintent {
namespace {

void SendJson(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& message) {
  SendJson(res, status, {{"error", message}});
}

template <typename F>
void Guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const ServiceError& e) {
    SendError(res, e.http_status(), e.what());
  } catch (const std::exception& e) {
    SendError(res, 500, e.what());
  }
}

}  // namespace

struct AnnotationServer::Impl {
  explicit Impl(AnnotationService& s) : service(s) {}
  AnnotationService& service;
  httplib::Server server;
};

AnnotationServer::AnnotationServer(AnnotationService& service)
    : impl_(std::make_unique<Impl>(service)) {
  httplib::Server& srv = impl_->server;
  AnnotationService& svc = impl_->service;

  srv.Get("/api/session", [&svc](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      const std::string annotator = req.get_param_value("annotator");
      SendJson(res, 200, SessionToJson(svc.CreateSession(annotator)));
    });
  });

  srv.Get(R"(/api/session/([^/]+)/next)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            Guarded(res, [&] { SendJson(res, 200, NextResultToJson(svc.Next(req.matches[1]))); });
          });

  srv.Post(R"(/api/session/([^/]+)/labels)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             Guarded(res, [&] {
               const nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
               if (body.is_discarded() || !body.is_object()) {
                 SendError(res, 400, "request body is not a JSON object");
                 return;
               }
               if (!body.contains("diff_id") || !body["diff_id"].is_string()) {
                 SendError(res, 422, "field 'diff_id' missing or not a string");
                 return;
               }
               std::set<Category> categories;
               if (body.contains("categories")) {
                 if (!body["categories"].is_array()) {
                   SendError(res, 422, "field 'categories' is not an array");
                   return;
                 }
                 for (const auto& c : body["categories"]) {
                   auto parsed = c.is_string() ? ParseCategory(c.get<std::string>()) : std::nullopt;
                   if (!parsed) {
                     SendError(res, 422, "unknown category " + c.dump());
                     return;
                   }
                   categories.insert(*parsed);
                 }
               }
               bool none_flag = false;
               if (body.contains("none_flag")) {
                 if (!body["none_flag"].is_boolean()) {
                   SendError(res, 422, "field 'none_flag' is not a boolean");
                   return;
                 }
                 none_flag = body["none_flag"].get<bool>();
               }
               std::optional<std::string> comment;
               if (body.contains("comment") && !body["comment"].is_null()) {
                 if (!body["comment"].is_string()) {
                   SendError(res, 422, "field 'comment' is not a string");
                   return;
                 }
                 comment = body["comment"].get<std::string>();
               }
               svc.Submit(req.matches[1], body["diff_id"].get<std::string>(), categories,
                          none_flag, std::move(comment));
               auto session = svc.GetSession(req.matches[1]);
               SendJson(res, 200,
                        {{"ok", true},
                         {"submitted_count", session ? session->submitted_count : 0}});
             });
           });

  srv.Get("/api/metrics", [&svc](const httplib::Request&, httplib::Response& res) {
    Guarded(res, [&] { SendJson(res, 200, svc.Metrics()); });
  });

  srv.Get("/api/definitions", [](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, AnnotationService::Definitions());
  });
}

AnnotationServer::~AnnotationServer() { Stop(); }

int AnnotationServer::BindToAnyPort(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool AnnotationServer::Bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

bool AnnotationServer::ListenAfterBind() { return impl_->server.listen_after_bind(); }

void AnnotationServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void AnnotationServer::WaitUntilReady() const { impl_->server.wait_until_ready(); }

}  // namespace editintent
