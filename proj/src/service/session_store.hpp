#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agent/events.hpp"
#include "agent/image_store.hpp"
#include "agent/orchestrator.hpp"
#include "agent/runner.hpp"
#include "agent/state.hpp"
#include "gateway/transcript.hpp"
#include "style/style_parser.hpp"

namespace photoart {

/// One persisted session: <root>/<id>/{source.png, images/, session.json,
/// events.jsonl, transcript.jsonl}.
class ManagedSession {
 public:
  const std::string& id() const { return id_; }
  const std::filesystem::path& dir() const { return dir_; }
  bool unrecoverable() const { return !unrecoverable_reason_.empty(); }
  const std::string& unrecoverable_reason() const { return unrecoverable_reason_; }

  // Last persisted state, safe to read while the session is being mutated.
  nlohmann::json snapshot() const;
  EventLog& events() { return *events_; }
  ImageStore& images() { return *images_; }

 private:
  friend class SessionStore;

  std::string id_;
  std::filesystem::path dir_;
  std::string unrecoverable_reason_;
  SessionState state_;
  std::unique_ptr<EventLog> events_;
  std::unique_ptr<DirectoryImageStore> images_;
  std::shared_ptr<TranscriptWriter> transcript_;
  std::shared_ptr<Backend> backend_;
  std::unique_ptr<Gateway> gateway_;
  std::unique_ptr<Orchestrator> orchestrator_;

  std::mutex mutation_;  // serializes direction/run/reference
  mutable std::mutex snapshot_mutex_;
  nlohmann::json snapshot_;
};

enum class RunMode { kStep, kAuto };

class SessionStore {
 public:
  // Loads every session folder under `root`. Snapshots caught mid-stage are
  // rolled back to that stage's entry; unreadable ones are kept but marked
  // unrecoverable.
  explicit SessionStore(AppConfig config);

  const AppConfig& config() const { return config_; }

  std::shared_ptr<ManagedSession> create(std::span<const std::uint8_t> encoded_image, std::string instruction,
                                         std::optional<int> max_iterations = std::nullopt);
  std::shared_ptr<ManagedSession> find(const std::string& id) const;  // null when unknown
  std::vector<std::shared_ptr<ManagedSession>> list() const;

  // The calls below serialize on the session's mutation lock.
  void set_direction(ManagedSession& s, const Direction& direction);
  // Step runs exactly one stage; auto runs until Done/Failed, picking the
  // first approach if a direction is still missing.
  void run(ManagedSession& s, RunMode mode);
  StyleDirective add_reference(ManagedSession& s, std::span<const std::uint8_t> encoded_image,
                               const std::optional<RetouchParams>& params);

 private:
  std::shared_ptr<ManagedSession> open(const std::filesystem::path& dir);
  void attach_backend(ManagedSession& s) const;
  void persist(ManagedSession& s) const;
  void step_locked(ManagedSession& s);
  void update_meta(ManagedSession& s) const;

  AppConfig config_;
  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<ManagedSession>> sessions_;
};

}  // namespace photoart
