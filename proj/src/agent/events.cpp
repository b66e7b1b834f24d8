#include "agent/events.hpp"

#include <sstream>

#include "common/error.hpp"
#include "common/files.hpp"

namespace photoart {

nlohmann::json Event::to_json() const {
  return {{"seq", seq}, {"type", type}, {"stage", stage}, {"iteration", iteration}, {"data", data}};
}

Event Event::from_json(const nlohmann::json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.type = j.at("type").get<std::string>();
  e.stage = j.at("stage").get<std::string>();
  e.iteration = j.at("iteration").get<int>();
  e.data = j.at("data");
  return e;
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  std::istringstream in(read_file_text(path_));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(ErrorCode::kParse, path_.string() + ": line " + std::to_string(n) + " is not JSON");
    }
    try {
      events_.push_back(Event::from_json(j));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, path_.string() + ": line " + std::to_string(n) + ": " + e.what());
    }
  }
}

const Event& EventLog::append(std::string type, std::string stage, int iteration, nlohmann::json data) {
  std::function<void(const Event&)> listener;
  Event copy;
  {
    std::lock_guard lock(mutex_);
    Event e{events_.size() + 1, std::move(type), std::move(stage), iteration, std::move(data)};
    if (!path_.empty()) append_line(path_, e.to_json().dump());
    events_.push_back(std::move(e));
    copy = events_.back();
    listener = listener_;
  }
  cv_.notify_all();
  if (listener) listener(copy);
  std::lock_guard lock(mutex_);
  return events_.back();
}

std::vector<Event> EventLog::since(std::uint64_t after_seq) const {
  std::lock_guard lock(mutex_);
  if (after_seq >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(after_seq), events_.end()};
}

std::uint64_t EventLog::size() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

bool EventLog::closed() const {
  std::lock_guard lock(mutex_);
  return !events_.empty() && (events_.back().type == "done" || events_.back().type == "failed");
}

bool EventLog::wait_for(std::uint64_t after_seq, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return cv_.wait_for(lock, timeout, [&] {
    const bool is_closed =
        !events_.empty() && (events_.back().type == "done" || events_.back().type == "failed");
    return events_.size() > after_seq || is_closed;
  });
}

void EventLog::truncate(std::uint64_t count) {
  std::lock_guard lock(mutex_);
  if (count >= events_.size()) return;
  events_.resize(count);
  rewrite_file();
}

void EventLog::rewrite_file() const {
  if (path_.empty()) return;
  std::string text;
  for (const auto& e : events_) text += e.to_json().dump() + "\n";
  write_file_atomic(path_, text);
}

void EventLog::set_listener(std::function<void(const Event&)> listener) {
  std::lock_guard lock(mutex_);
  listener_ = std::move(listener);
}

}  // namespace photoart
