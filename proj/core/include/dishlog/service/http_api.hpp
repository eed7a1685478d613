// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON over HTTP in front of DietService.
//
//   POST /users                  profile              -> 201 {user_id, profile}
//   GET  /users/{id}                                  -> {profile, goal|null}
//   PUT  /users/{id}/goal        {formula?}           -> goal
//   POST /users/{id}/meals       {counts}|{detections} -> 201 meal
//   GET  /users/{id}/tracker?now=<rfc3339>            -> tracker
//   GET  /users/{id}/history?from=<date>&to=<date>    -> {days}
//   GET  /dishes                                      -> {dishes, confidence_threshold}
//   POST /evaluations            {classes, ground_truth, detections, iou?, conf?} -> report
//
// Writes accept a `request_id` body field or an `Idempotency-Key` header.
// Errors are {"error": {"code", "message", "line"?}}.

#pragma once

#include <memory>
#include <string>

#include "dishlog/error.hpp"
#include "dishlog/service/diet_service.hpp"

namespace dishlog::service {

/// 404 kUnknownUser, 409 kNoGoal, 422 kNoEvaluableClasses / kMissingDishCalories /
/// kEmptyMeal, 500 kIo, 400 otherwise.
int http_status_for(ErrorCode code);

class HttpApi {
 public:
  explicit HttpApi(DietService& service);
  ~HttpApi();

  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  /// Binds to `port` (0 picks a free one). Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dishlog::service
