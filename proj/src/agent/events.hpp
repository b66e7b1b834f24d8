#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace photoart {

// Event types: stage_entered, text_emitted, params_proposed, image_rendered,
// verdict, done, failed.
struct Event {
  std::uint64_t seq = 0;  // 1-based, dense
  std::string type;
  std::string stage;
  int iteration = 0;
  nlohmann::json data = nlohmann::json::object();

  nlohmann::json to_json() const;
  static Event from_json(const nlohmann::json& value);
};

/// Append-only, thread-safe session log. Readers can block until new events
/// arrive; the log is closed once a done or failed event is appended.
class EventLog {
 public:
  EventLog() = default;
  // Backed by a JSONL file; existing lines are loaded first.
  explicit EventLog(std::filesystem::path path);

  const Event& append(std::string type, std::string stage, int iteration, nlohmann::json data);

  std::vector<Event> since(std::uint64_t after_seq) const;
  std::vector<Event> all() const { return since(0); }
  std::uint64_t size() const;
  bool closed() const;

  // Blocks until an event with seq > after_seq exists, the log is closed, or
  // the timeout passes. Returns true if there is something new to read.
  bool wait_for(std::uint64_t after_seq, std::chrono::milliseconds timeout) const;

  // Drops events after `count` (rollback of an interrupted stage).
  void truncate(std::uint64_t count);

  void set_listener(std::function<void(const Event&)> listener);

 private:
  void rewrite_file() const;

  std::filesystem::path path_;
  std::vector<Event> events_;
  std::function<void(const Event&)> listener_;
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
};

}  // namespace photoart
