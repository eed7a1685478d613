// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/service/http_api.hpp"

#include <httplib.h>

#include <functional>

namespace dishlog::service {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                std::size_t line = 0) {
  Json err = {{"code", code}, {"message", message}};
  if (line != 0) err["line"] = line;
  send_json(res, status, {{"error", err}});
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  auto j = Json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "request body is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  return j;
}

std::optional<std::string> request_id(const httplib::Request& req, const Json& body) {
  if (body.contains("request_id")) {
    if (!body.at("request_id").is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "\"request_id\" must be a string");
    }
    return body.at("request_id").get<std::string>();
  }
  if (req.has_header("Idempotency-Key")) return req.get_header_value("Idempotency-Key");
  return std::nullopt;
}

std::optional<Instant> instant_field(const Json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  if (!body.at(key).is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("\"") + key + "\" must be an RFC 3339 string");
  }
  return parse_instant(body.at(key).get<std::string>());
}

std::string query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("missing query parameter \"") + key + "\"");
  }
  return req.get_param_value(key);
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const Error& e) {
      send_error(res, http_status_for(e.code()), to_string(e.code()), e.message(), e.line());
    } catch (const Json::exception& e) {
      send_error(res, 400, to_string(ErrorCode::kInvalidArgument), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  };
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownUser: return 404;
    case ErrorCode::kNoGoal: return 409;
    case ErrorCode::kNoEvaluableClasses:
    case ErrorCode::kMissingDishCalories:
    case ErrorCode::kEmptyMeal: return 422;
    case ErrorCode::kIo: return 500;
    default: return 400;
  }
}

struct HttpApi::Impl {
  DietService& service;
  httplib::Server server;

  explicit Impl(DietService& s) : service(s) { routes(); }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type, Idempotency-Key"},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.body.empty() && res.status == 404) {
        send_error(res, 404, "NotFound", "no route for " + req.method + " " + req.path);
      }
    });

    server.Post("/users", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      const auto id = service.create_user(profile_from_json(body), request_id(req, body));
      send_json(res, 201, {{"user_id", id}, {"profile", profile_to_json(service.get_user(id))}});
    }));

    server.Get(R"(/users/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      const auto profile = service.get_user(id);
      const auto goal = service.get_goal(id);
      send_json(res, 200, {{"profile", profile_to_json(profile)},
                           {"goal", goal ? goal_to_json(*goal) : Json(nullptr)}});
    }));

    server.Put(R"(/users/([^/]+)/goal)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      BmrFormula formula = kDefaultBmrFormula;
      if (body.contains("formula")) {
        if (!body.at("formula").is_string()) {
          throw Error(ErrorCode::kInvalidArgument, "\"formula\" must be a string");
        }
        formula = parse_bmr_formula(body.at("formula").get<std::string>());
      }
      const auto goal = service.set_goal(std::string(req.matches[1]), formula, request_id(req, body));
      send_json(res, 200, goal_to_json(goal));
    }));

    server.Post(R"(/users/([^/]+)/meals)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      MealLog meal;
      if (req.get_header_value("Content-Type").starts_with("text/plain")) {
        std::optional<Instant> ts;
        if (req.has_param("timestamp")) ts = parse_instant(req.get_param_value("timestamp"));
        std::optional<std::string> rid;
        if (req.has_header("Idempotency-Key")) rid = req.get_header_value("Idempotency-Key");
        meal = service.post_meal_detections(id, req.body, ts, rid);
      } else {
        const auto body = parse_body(req);
        const auto ts = instant_field(body, "timestamp");
        const auto rid = request_id(req, body);
        const bool has_counts = body.contains("counts");
        const bool has_detections = body.contains("detections");
        if (has_counts == has_detections) {
          throw Error(ErrorCode::kInvalidArgument, "exactly one of \"counts\" or \"detections\" is required");
        }
        if (has_counts) {
          meal = service.post_meal(id, counts_from_json(body.at("counts"), service.dishes()), ts, rid);
        } else {
          if (!body.at("detections").is_string()) {
            throw Error(ErrorCode::kInvalidArgument, "\"detections\" must be detection-file text");
          }
          meal = service.post_meal_detections(id, body.at("detections").get<std::string>(), ts, rid);
        }
      }
      send_json(res, 201, meal_to_json(meal));
    }));

    server.Get(R"(/users/([^/]+)/tracker)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::optional<Instant> now;
      if (req.has_param("now")) now = parse_instant(req.get_param_value("now"));
      send_json(res, 200, tracker_to_json(service.get_tracker(std::string(req.matches[1]), now)));
    }));

    server.Get(R"(/users/([^/]+)/history)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto from = CivilDate::parse(query(req, "from"));
      const auto to = CivilDate::parse(query(req, "to"));
      const auto days = service.get_history(std::string(req.matches[1]), from, to);
      send_json(res, 200, {{"days", history_to_json(days)}});
    }));

    server.Get("/dishes", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"dishes", dishes_to_json(service.dishes())},
                           {"confidence_threshold", service.confidence_threshold()}});
    }));

    server.Post("/evaluations", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto result = service.post_evaluation(evaluation_request_from_json(parse_body(req)));
      send_json(res, 200, report_to_json(result.report, result.registry));
    }));
  }
};

HttpApi::HttpApi(DietService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpApi::~HttpApi() = default;

int HttpApi::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpApi::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpApi::stop() { impl_->server.stop(); }

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace dishlog::service
