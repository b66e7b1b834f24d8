#include "gateway/transcript.hpp"

#include <sstream>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/files.hpp"

namespace photoart {

namespace {

using json = nlohmann::json;

// Lines are nlohmann's default dump (sorted keys, compact), so a value always
// serializes to the same bytes.
std::string seal(json line) {
  line.erase("checksum");
  line["checksum"] = sha256_hex(line.dump());
  return line.dump();
}

bool checksum_ok(const json& line) {
  if (!line.contains("checksum") || !line["checksum"].is_string()) return false;
  json body = line;
  body.erase("checksum");
  return sha256_hex(body.dump()) == line["checksum"].get<std::string>();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

TranscriptMeta meta_from(const json& j) {
  if (j.value("kind", "") != "meta") fail(ErrorCode::kParse, "first record must be kind \"meta\"");
  if (j.value("format", "") != kTranscriptFormat) {
    fail(ErrorCode::kParse, "unsupported transcript format '" + j.value("format", "") + "'");
  }
  TranscriptMeta m;
  m.source_digest = j.at("source_digest").get<std::string>();
  m.instruction = j.at("instruction").get<std::string>();
  m.direction = j.at("direction");
  m.max_iterations = j.at("max_iterations").get<int>();
  m.style = j.at("style").get<std::vector<std::string>>();
  return m;
}

TranscriptEntry entry_from(const json& j) {
  if (j.value("kind", "") != "exchange") fail(ErrorCode::kParse, "expected kind \"exchange\"");
  TranscriptEntry e;
  e.index = j.at("index").get<int>();
  e.stage = j.at("stage").get<std::string>();
  e.iteration = j.at("iteration").get<int>();
  e.request_digest = j.at("request_digest").get<std::string>();
  e.image_digests = j.at("image_digests").get<std::map<std::string, std::string>>();
  e.schema = j.at("schema").get<std::string>();
  e.temperature = j.at("temperature").get<double>();
  const auto& r = j.at("response");
  e.text = r.at("text").get<std::string>();
  e.payload = r.at("payload");
  e.malformed = r.at("malformed").get<bool>();
  e.usage.prompt_tokens = r.at("usage").at("prompt_tokens").get<int>();
  e.usage.completion_tokens = r.at("usage").at("completion_tokens").get<int>();
  return e;
}

}  // namespace

std::string Transcript::meta_line(const TranscriptMeta& m) {
  return seal({{"kind", "meta"},
               {"format", kTranscriptFormat},
               {"source_digest", m.source_digest},
               {"instruction", m.instruction},
               {"direction", m.direction},
               {"max_iterations", m.max_iterations},
               {"style", m.style}});
}

std::string Transcript::entry_line(const TranscriptEntry& e) {
  return seal({{"kind", "exchange"},
               {"index", e.index},
               {"stage", e.stage},
               {"iteration", e.iteration},
               {"request_digest", e.request_digest},
               {"image_digests", e.image_digests},
               {"schema", e.schema},
               {"temperature", e.temperature},
               {"response",
                {{"text", e.text},
                 {"payload", e.payload},
                 {"malformed", e.malformed},
                 {"usage",
                  {{"prompt_tokens", e.usage.prompt_tokens},
                   {"completion_tokens", e.usage.completion_tokens}}}}}});
}

Transcript Transcript::parse(std::string_view text) {
  Transcript t;
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::kParse, "transcript is empty");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto where = "transcript line " + std::to_string(i + 1) + ": ";
    const auto j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail(ErrorCode::kParse, where + "not a JSON object");
    try {
      if (i == 0) {
        t.meta = meta_from(j);
      } else {
        t.entries.push_back(entry_from(j));
        if (t.entries.back().index != static_cast<int>(i - 1)) {
          fail(ErrorCode::kParse, "index out of sequence");
        }
      }
    } catch (const Error& e) {
      fail(ErrorCode::kParse, where + e.what());
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, where + e.what());
    }
  }
  return t;
}

Transcript Transcript::load(const std::filesystem::path& path) {
  try {
    return parse(read_file_text(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) fail(ErrorCode::kParse, path.string() + ": " + e.what());
    throw;
  }
}

std::string Transcript::serialize() const {
  std::string out = meta_line(meta) + "\n";
  for (const auto& e : entries) out += entry_line(e) + "\n";
  return out;
}

void Transcript::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

std::vector<std::string> Transcript::integrity_problems(std::string_view text) {
  std::vector<std::string> problems;
  if (text.empty() || text.back() != '\n') problems.push_back("file does not end with a newline");
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto where = "line " + std::to_string(i + 1) + ": ";
    const auto j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      problems.push_back(where + "not valid JSON");
      continue;
    }
    if (!checksum_ok(j)) problems.push_back(where + "checksum mismatch");
    if (j.dump() != lines[i]) problems.push_back(where + "not in canonical form");
  }
  try {
    const auto t = parse(text);
    if (t.serialize() != text) problems.push_back("re-serialization differs from the file");
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  return problems;
}

TranscriptEntry make_entry(int index, const BackendRequest& request, const BackendResponse& response) {
  TranscriptEntry e;
  e.index = index;
  e.stage = request.stage;
  e.iteration = request.iteration;
  e.request_digest = request_digest(request);
  for (const auto& img : request.images) e.image_digests[img.role] = img.digest;
  e.schema = request.schema_id;
  e.temperature = request.temperature;
  e.text = response.text;
  e.payload = response.payload;
  e.malformed = response.malformed;
  e.usage = response.usage;
  return e;
}

TranscriptWriter::TranscriptWriter(std::filesystem::path path, TranscriptMeta meta) : path_(std::move(path)) {
  transcript_.meta = std::move(meta);
  rewrite();
}

std::shared_ptr<TranscriptWriter> TranscriptWriter::reopen(const std::filesystem::path& path) {
  std::shared_ptr<TranscriptWriter> w(new TranscriptWriter());
  w->path_ = path;
  w->transcript_ = Transcript::load(path);
  return w;
}

void TranscriptWriter::rewrite() const {
  if (!path_.empty()) transcript_.save(path_);
}

void TranscriptWriter::set_meta(const TranscriptMeta& meta) {
  std::lock_guard lock(mutex_);
  transcript_.meta = meta;
  rewrite();
}

void TranscriptWriter::append(const BackendRequest& request, const BackendResponse& response) {
  std::lock_guard lock(mutex_);
  auto entry = make_entry(static_cast<int>(transcript_.entries.size()), request, response);
  if (!path_.empty()) append_line(path_, Transcript::entry_line(entry));
  transcript_.entries.push_back(std::move(entry));
}

void TranscriptWriter::truncate(std::size_t entries) {
  std::lock_guard lock(mutex_);
  if (entries >= transcript_.entries.size()) return;
  transcript_.entries.resize(entries);
  rewrite();
}

std::size_t TranscriptWriter::size() const {
  std::lock_guard lock(mutex_);
  return transcript_.entries.size();
}

Transcript TranscriptWriter::snapshot() const {
  std::lock_guard lock(mutex_);
  return transcript_;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<TranscriptWriter> writer)
    : inner_(std::move(inner)), writer_(std::move(writer)) {}

BackendResponse RecordingBackend::complete(const BackendRequest& request) {
  auto response = inner_->complete(request);
  check_response(request, response);
  writer_->append(request, response);
  return response;
}

ReplayBackend::ReplayBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

BackendResponse ReplayBackend::complete(const BackendRequest& request) {
  const auto where = "replay entry " + std::to_string(next_) + ": ";
  if (next_ >= transcript_.entries.size()) {
    fail(ErrorCode::kDivergence, where + "transcript exhausted at stage " + request.stage);
  }
  const auto& e = transcript_.entries[next_];
  if (e.stage != request.stage) {
    fail(ErrorCode::kDivergence, where + "stage " + request.stage + " does not match recorded " + e.stage);
  }
  std::map<std::string, std::string> digests;
  for (const auto& img : request.images) digests[img.role] = img.digest;
  if (digests != e.image_digests) {
    std::string detail;
    for (const auto& [role, d] : e.image_digests) {
      auto it = digests.find(role);
      if (it == digests.end() || it->second != d) {
        detail += " " + role + " recorded " + d.substr(0, 12) + " got " +
                  (it == digests.end() ? std::string("none") : it->second.substr(0, 12));
      }
    }
    fail(ErrorCode::kDivergence, where + "image digest mismatch at stage " + e.stage + ":" + detail);
  }
  if (request_digest(request) != e.request_digest) {
    fail(ErrorCode::kDivergence, where + "request digest mismatch at stage " + e.stage);
  }
  ++next_;
  BackendResponse r;
  r.text = e.text;
  r.usage = e.usage;
  return r;
}

}  // namespace photoart
