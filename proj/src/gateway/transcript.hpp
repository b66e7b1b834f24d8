#pragma once

#include <filesystem>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gateway/gateway.hpp"
#include "json.hpp"

namespace photoart {

inline constexpr std::string_view kTranscriptFormat = "photoart-transcript/1";

struct TranscriptMeta {
  std::string source_digest;
  std::string instruction;
  nlohmann::json direction = nlohmann::json::object();  // {"approach_index": n} or {"text": ...}
  int max_iterations = 5;
  std::vector<std::string> style;  // style directives fed to the plan stage
};

struct TranscriptEntry {
  int index = 0;
  std::string stage;
  int iteration = 0;
  std::string request_digest;
  std::map<std::string, std::string> image_digests;  // role -> digest
  std::string schema;
  double temperature = 0.0;
  std::string text;
  nlohmann::json payload;
  bool malformed = false;
  TokenUsage usage;
};

/// Append-only JSONL record of a session's model exchanges. Line 1 is the
/// meta record, then one exchange per line; every line carries a sha256
/// checksum of its own canonical form.
class Transcript {
 public:
  TranscriptMeta meta;
  std::vector<TranscriptEntry> entries;

  // Throws Error(kParse) naming the line of the first unreadable record.
  static Transcript parse(std::string_view text);
  static Transcript load(const std::filesystem::path& path);

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  // Problems that make the text differ from what serialize() would write:
  // non-canonical bytes, checksum mismatches, unreadable lines.
  static std::vector<std::string> integrity_problems(std::string_view text);

  static std::string meta_line(const TranscriptMeta& meta);
  static std::string entry_line(const TranscriptEntry& entry);
};

TranscriptEntry make_entry(int index, const BackendRequest& request, const BackendResponse& response);

/// Writes the meta line on construction and appends each exchange as it
/// happens. With an empty path the transcript is kept in memory only.
class TranscriptWriter {
 public:
  TranscriptWriter(std::filesystem::path path, TranscriptMeta meta);
  // Continues an existing file (session restore).
  static std::shared_ptr<TranscriptWriter> reopen(const std::filesystem::path& path);

  void append(const BackendRequest& request, const BackendResponse& response);
  Transcript snapshot() const;
  void set_meta(const TranscriptMeta& meta);  // rewrites the file
  void truncate(std::size_t entries);          // rollback; rewrites the file
  std::size_t size() const;

 private:
  TranscriptWriter() = default;
  void rewrite() const;

  std::filesystem::path path_;
  Transcript transcript_;
  mutable std::mutex mutex_;
};

class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<TranscriptWriter> writer);
  std::string name() const override { return inner_->name(); }
  BackendResponse complete(const BackendRequest& request) override;

 private:
  std::shared_ptr<Backend> inner_;
  std::shared_ptr<TranscriptWriter> writer_;
};

/// Serves recorded responses in order. Each request must match the next
/// entry's stage, image digests and request digest, else Error(kDivergence).
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(Transcript transcript);
  std::string name() const override { return "replay"; }
  BackendResponse complete(const BackendRequest& request) override;

  void skip(std::size_t n) { next_ = std::min(next_ + n, transcript_.entries.size()); }
  std::size_t consumed() const { return next_; }
  std::size_t size() const { return transcript_.entries.size(); }
  const Transcript& transcript() const { return transcript_; }

 private:
  Transcript transcript_;
  std::size_t next_ = 0;
};

}  // namespace photoart
