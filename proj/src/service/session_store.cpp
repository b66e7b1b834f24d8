#include "service/session_store.hpp"

#include <random>

#include "common/error.hpp"
#include "common/files.hpp"
#include "histogram/histogram.hpp"

namespace photoart {

namespace {

namespace fs = std::filesystem;

std::string new_session_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

// An upload that does not decode is the client's fault, not an I/O error.
Image decode_upload(std::span<const std::uint8_t> encoded) {
  try {
    return decode_image(encoded);
  } catch (const Error& e) {
    fail(ErrorCode::kValidation, std::string("uploaded image: ") + e.what());
  }
}

}  // namespace

nlohmann::json ManagedSession::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

SessionStore::SessionStore(AppConfig config) : config_(std::move(config)), root_(config_.store_root) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create store root " + root_.string() + ": " + ec.message());
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    auto s = open(entry.path());
    sessions_[s->id_] = s;
  }
}

void SessionStore::attach_backend(ManagedSession& s) const {
  s.backend_ = make_backend(config_.backend);
  auto recording = std::make_shared<RecordingBackend>(s.backend_, s.transcript_);
  s.gateway_ = std::make_unique<Gateway>(recording);
  AgentOptions options;
  options.temperature = config_.temperature;
  options.max_iterations = s.state_.max_iterations;
  s.orchestrator_ = std::make_unique<Orchestrator>(*s.gateway_, *s.images_, options);
}

std::shared_ptr<ManagedSession> SessionStore::open(const fs::path& dir) {
  auto s = std::make_shared<ManagedSession>();
  s->id_ = dir.filename().string();
  s->dir_ = dir;
  try {
    auto state = session_from_json(nlohmann::json::parse(read_file_text(dir / "session.json")));
    if (state.id != s->id_) fail(ErrorCode::kParse, "snapshot id does not match its folder");
    s->events_ = std::make_unique<EventLog>(dir / "events.jsonl");
    s->images_ = std::make_unique<DirectoryImageStore>(dir / "images");
    s->transcript_ = TranscriptWriter::reopen(dir / "transcript.jsonl");
    if (state.in_flight) {
      // Interrupted mid-stage: drop whatever the stage logged and resume at
      // its entry.
      s->events_->truncate(state.event_count);
      s->transcript_->truncate(state.transcript_count);
      state.stage = *state.in_flight;
      state.in_flight.reset();
    }
    s->state_ = std::move(state);
    attach_backend(*s);
    if (auto* replay = dynamic_cast<ReplayBackend*>(s->backend_.get())) replay->skip(s->transcript_->size());
    persist(*s);
  } catch (const std::exception& e) {
    s->unrecoverable_reason_ = e.what();
    std::lock_guard lock(s->snapshot_mutex_);
    s->snapshot_ = {{"id", s->id_}, {"unrecoverable", true}, {"error", s->unrecoverable_reason_}};
  }
  return s;
}

std::shared_ptr<ManagedSession> SessionStore::create(std::span<const std::uint8_t> encoded, std::string instruction,
                                                     std::optional<int> max_iterations) {
  const auto source = decode_upload(encoded);  // before anything touches disk
  auto s = std::make_shared<ManagedSession>();
  s->id_ = new_session_id();
  s->dir_ = root_ / s->id_;
  fs::create_directories(s->dir_);
  write_file_atomic(s->dir_ / "source.png", encode_png(source));
  s->events_ = std::make_unique<EventLog>(s->dir_ / "events.jsonl");
  s->images_ = std::make_unique<DirectoryImageStore>(s->dir_ / "images");

  // A replay-backed store answers from one recording, so unset session
  // settings follow it.
  if (config_.backend.kind == "replay" && !config_.backend.transcript.empty()) {
    const auto meta = Transcript::load(config_.backend.transcript).meta;
    if (instruction.empty()) instruction = meta.instruction;
    if (!max_iterations) max_iterations = meta.max_iterations;
  }
  const int cap = max_iterations.value_or(config_.max_iterations);
  if (cap < 1) fail(ErrorCode::kValidation, "max_iterations must be at least 1");
  TranscriptMeta meta;
  meta.source_digest = image_digest(source);
  meta.instruction = instruction;
  meta.max_iterations = cap;
  s->transcript_ = std::make_shared<TranscriptWriter>(s->dir_ / "transcript.jsonl", meta);
  s->state_.max_iterations = cap;
  attach_backend(*s);
  s->state_ = s->orchestrator_->start(source, std::move(instruction), *s->events_);
  s->state_.id = s->id_;
  persist(*s);

  std::lock_guard lock(mutex_);
  sessions_[s->id_] = s;
  return s;
}

std::shared_ptr<ManagedSession> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<ManagedSession>> SessionStore::list() const {
  std::lock_guard lock(mutex_);
  std::vector<std::shared_ptr<ManagedSession>> out;
  for (const auto& [id, s] : sessions_) out.push_back(s);
  return out;
}

void SessionStore::persist(ManagedSession& s) const {
  s.state_.event_count = s.events_->size();
  s.state_.transcript_count = s.transcript_->size();
  auto j = to_json(s.state_);
  write_file_atomic(s.dir_ / "session.json", j.dump(1));
  std::lock_guard lock(s.snapshot_mutex_);
  s.snapshot_ = std::move(j);
}

void SessionStore::update_meta(ManagedSession& s) const {
  auto t = s.transcript_->snapshot();
  t.meta.direction = s.state_.direction ? s.state_.direction->to_json() : nlohmann::json::object();
  t.meta.style = s.state_.style_directives;
  s.transcript_->set_meta(t.meta);
}

void SessionStore::set_direction(ManagedSession& s, const Direction& direction) {
  if (s.unrecoverable()) fail(ErrorCode::kInternal, "session is unrecoverable: " + s.unrecoverable_reason_);
  std::lock_guard lock(s.mutation_);
  s.orchestrator_->inject_direction(s.state_, direction, *s.events_);
  update_meta(s);
  persist(s);
}

void SessionStore::step_locked(ManagedSession& s) {
  s.state_.in_flight = s.state_.stage;
  persist(s);
  try {
    s.orchestrator_->advance(s.state_, *s.events_);
  } catch (...) {
    s.state_.in_flight.reset();
    persist(s);
    throw;
  }
  s.state_.in_flight.reset();
  persist(s);
}

void SessionStore::run(ManagedSession& s, RunMode mode) {
  if (s.unrecoverable()) fail(ErrorCode::kInternal, "session is unrecoverable: " + s.unrecoverable_reason_);
  std::lock_guard lock(s.mutation_);
  if (is_terminal(s.state_.stage)) {
    fail(ErrorCode::kWrongStage, "session is already " + std::string(stage_name(s.state_.stage)));
  }
  if (mode == RunMode::kStep) {
    step_locked(s);
    return;
  }
  while (!is_terminal(s.state_.stage)) {
    if (s.state_.stage == Stage::kAwaitUserDirection) {
      s.orchestrator_->inject_direction(s.state_, {1, ""}, *s.events_);
      update_meta(s);
      persist(s);
      continue;
    }
    step_locked(s);
  }
}

StyleDirective SessionStore::add_reference(ManagedSession& s, std::span<const std::uint8_t> encoded,
                                           const std::optional<RetouchParams>& params) {
  if (s.unrecoverable()) fail(ErrorCode::kInternal, "session is unrecoverable: " + s.unrecoverable_reason_);
  std::lock_guard lock(s.mutation_);
  const auto stage = s.state_.stage;
  if (stage != Stage::kContentDescription && stage != Stage::kStrategyProposal &&
      stage != Stage::kAwaitUserDirection) {
    fail(ErrorCode::kWrongStage, "style references are accepted only before the plan is made");
  }
  if (encoded.empty()) fail(ErrorCode::kValidation, "reference image is empty");
  const auto image = decode_upload(encoded);
  StyleDirective d;
  if (params) {
    d = parse_reference_case(image, *params);
  } else {
    // Not recorded: the resulting text travels in the transcript meta.
    Gateway direct(s.backend_);
    d = parse_reference_image(direct, image, config_.temperature);
  }
  s.state_.style_directives.push_back(d.text);
  s.events_->append("text_emitted", std::string(stage_name(stage)), 0,
                    {{"source", "style_parser"}, {"text", d.text}, {"kind", style_source_name(d.source)}});
  update_meta(s);
  persist(s);
  return d;
}

}  // namespace photoart
