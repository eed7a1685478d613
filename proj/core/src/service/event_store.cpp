// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/service/event_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "dishlog/error.hpp"

namespace dishlog::service {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLogName = "events.jsonl";
constexpr const char* kSnapshotName = "snapshot.json";

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const std::string& what) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error(what);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kUserCreated: return "user_created";
    case EventKind::kGoalSet: return "goal_set";
    case EventKind::kMealLogged: return "meal_logged";
  }
  return "user_created";
}

EventKind parse_event_kind(std::string_view text) {
  for (const auto k : {EventKind::kUserCreated, EventKind::kGoalSet, EventKind::kMealLogged}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::kFormat, "unknown event kind \"" + std::string(text) + "\"");
}

EventStore::EventStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  const auto path = dir_ / kLogName;
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) io_error("open " + path.string());
}

EventStore::~EventStore() {
  if (fd_ >= 0) ::close(fd_);
}

EventStore::Recovered EventStore::recover() {
  Recovered out;
  const auto snapshot_path = dir_ / kSnapshotName;
  if (fs::exists(snapshot_path)) {
    auto snapshot = Json::parse(read_text_file(snapshot_path), nullptr, false);
    if (snapshot.is_discarded() || !snapshot.contains("seq") || !snapshot.contains("state")) {
      throw Error(ErrorCode::kFormat, "corrupt snapshot " + snapshot_path.string());
    }
    out.snapshot_seq = snapshot.at("seq").get<std::uint64_t>();
    out.snapshot = std::move(snapshot.at("state"));
  }

  const auto log_path = dir_ / kLogName;
  const std::string text = read_text_file(log_path);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::uint64_t prev = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto end = text.find('\n', pos);
    if (end == std::string::npos) {
      // Torn write from a crash: never acknowledged, so drop it.
      if (::ftruncate(fd_, static_cast<off_t>(pos)) != 0) io_error("truncate " + log_path.string());
      break;
    }
    const auto j = Json::parse(text.substr(pos, end - pos), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("seq") || !j.contains("kind") ||
        !j.contains("payload") || !j.contains("instant")) {
      throw Error(ErrorCode::kFormat, "corrupt event in " + log_path.string(), line_no);
    }
    StoredEvent ev;
    ev.seq = j.at("seq").get<std::uint64_t>();
    ev.kind = parse_event_kind(j.at("kind").get<std::string>());
    ev.payload = j.at("payload");
    ev.instant = parse_instant(j.at("instant").get<std::string>());
    if (ev.seq <= prev) {
      throw Error(ErrorCode::kFormat, "event sequence not increasing in " + log_path.string(), line_no);
    }
    prev = ev.seq;
    if (ev.seq > out.snapshot_seq) out.events.push_back(std::move(ev));
    pos = end + 1;
  }
  last_seq_ = std::max(prev, out.snapshot_seq);
  return out;
}

StoredEvent EventStore::append(EventKind kind, Json payload, Instant instant) {
  StoredEvent ev{last_seq_ + 1, kind, std::move(payload), instant};
  const Json line = {{"seq", ev.seq},
                     {"kind", to_string(kind)},
                     {"instant", format_instant(instant)},
                     {"payload", ev.payload}};
  write_all(fd_, line.dump() + "\n", "append event");
  if (::fsync(fd_) != 0) io_error("fsync event log");
  last_seq_ = ev.seq;
  return ev;
}

void EventStore::write_snapshot(std::uint64_t seq, const Json& state) {
  const auto tmp = dir_ / "snapshot.json.tmp";
  const Json doc = {{"seq", seq}, {"state", state}};
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("open " + tmp.string());
  try {
    write_all(fd, doc.dump(), "write snapshot");
    if (::fsync(fd) != 0) io_error("fsync snapshot");
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  fs::rename(tmp, dir_ / kSnapshotName);
}

}  // namespace dishlog::service
