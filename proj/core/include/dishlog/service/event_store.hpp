// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "dishlog/nutrition.hpp"
#include "dishlog/service/json_codec.hpp"

namespace dishlog::service {

enum class EventKind { kUserCreated, kGoalSet, kMealLogged };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

struct StoredEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kUserCreated;
  Json payload;
  Instant instant{};
};

/// Append-only log of one JSON object per line (`events.jsonl`) plus an
/// optional `snapshot.json` holding state as of some sequence number.
///
/// append() returns only after the line is fsync'ed. A torn final line left
/// by a crash is dropped (and truncated away) on recovery; a malformed line
/// anywhere else is reported as corruption.
class EventStore {
 public:
  explicit EventStore(std::filesystem::path dir);
  ~EventStore();

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  struct Recovered {
    std::optional<Json> snapshot;
    std::uint64_t snapshot_seq = 0;
    std::vector<StoredEvent> events;  // seq > snapshot_seq, ascending
  };

  Recovered recover();

  StoredEvent append(EventKind kind, Json payload, Instant instant);

  /// Atomically replaces the snapshot (write to a temp file, fsync, rename).
  void write_snapshot(std::uint64_t seq, const Json& state);

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  int fd_ = -1;
  std::uint64_t last_seq_ = 0;
};

}  // namespace dishlog::service
