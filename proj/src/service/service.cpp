#include "service/service.hpp"

#include <charconv>

#include "common/error.hpp"
#include "httplib.h"

namespace photoart {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxUpload = 64u << 20;
constexpr auto kSsePoll = std::chrono::milliseconds(250);
constexpr int kKeepalivePolls = 60;  // comment line every ~15 s of silence

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const json& session = nullptr) {
  json body = {{"error", message}};
  if (!session.is_null()) body["session"] = session;
  send_json(res, status, body);
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) fail(ErrorCode::kValidation, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kValidation, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::optional<std::uint64_t> parse_seq(const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::string sse_frame(const Event& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + e.to_json().dump() + "\n\n";
}

json session_summary(const ManagedSession& s) {
  auto snap = s.snapshot();
  if (s.unrecoverable()) return snap;
  return {{"id", snap["id"]},
          {"stage", snap["stage"]},
          {"instruction", snap["instruction"]},
          {"iterations", snap["iterations"].size()},
          {"outcome", snap["outcome"]}};
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kWrongStage: return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kValidation:
    case ErrorCode::kParse: return 422;
    case ErrorCode::kBackend:
    case ErrorCode::kMalformedOutput:
    case ErrorCode::kDivergence: return 502;
    case ErrorCode::kIo:
    case ErrorCode::kInternal: return 500;
  }
  return 500;
}

Service::Service(AppConfig config) : store_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  server_->set_payload_max_length(kMaxUpload);
  routes();
}

Service::~Service() { stop(); }

int Service::bind() {
  if (port_ >= 0) return port_;
  const auto& c = store_.config();
  port_ = c.port == 0 ? server_->bind_to_any_port(c.host) : (server_->bind_to_port(c.host, c.port) ? c.port : -1);
  if (port_ < 0) fail(ErrorCode::kIo, "cannot bind " + c.host + ":" + std::to_string(c.port));
  return port_;
}

void Service::listen() {
  bind();
  server_->listen_after_bind();
}

void Service::start() {
  bind();
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::stop() {
  stopping_ = true;
  server_->stop();
  if (listener_.joinable()) listener_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mutex_);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
}

void Service::routes() {
  auto& srv = *server_;

  // Every handler runs inside this wrapper: Error codes map to HTTP statuses,
  // and backend failures carry the (Failed) session so clients can inspect it.
  auto guarded = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      std::shared_ptr<ManagedSession> session;
      try {
        if (req.path_params.count("id")) {
          session = store_.find(req.path_params.at("id"));
          if (!session) fail(ErrorCode::kNotFound, "unknown session " + req.path_params.at("id"));
        }
        handler(req, res, session);
      } catch (const Error& e) {
        const int status = http_status(e.code());
        send_error(res, status, e.what(), status == 502 && session ? session->snapshot() : json(nullptr));
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    };
  };
  auto require_usable = [](const ManagedSession& s) {
    if (s.unrecoverable()) fail(ErrorCode::kInternal, "session is unrecoverable: " + s.unrecoverable_reason());
  };

  srv.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res, auto) {
             if (!req.has_file("image")) fail(ErrorCode::kValidation, "multipart field 'image' is required");
             const auto& file = req.get_file_value("image");
             std::string instruction = req.has_file("instruction") ? req.get_file_value("instruction").content : "";
             std::optional<int> cap;
             if (req.has_file("max_iterations")) {
               auto v = parse_seq(req.get_file_value("max_iterations").content);
               if (!v || *v < 1 || *v > 100) fail(ErrorCode::kValidation, "max_iterations must be in [1, 100]");
               cap = static_cast<int>(*v);
             }
             const auto* data = reinterpret_cast<const std::uint8_t*>(file.content.data());
             auto s = store_.create({data, file.content.size()}, std::move(instruction), cap);
             send_json(res, 201, {{"id", s->id()}, {"session", s->snapshot()}});
           }));

  srv.Get("/api/sessions", guarded([this](const httplib::Request&, httplib::Response& res, auto) {
            json out = json::array();
            for (const auto& s : store_.list()) out.push_back(session_summary(*s));
            send_json(res, 200, out);
          }));

  srv.Get("/api/sessions/:id", guarded([require_usable](const httplib::Request&, httplib::Response& res,
                                                         const std::shared_ptr<ManagedSession>& s) {
            require_usable(*s);
            send_json(res, 200, s->snapshot());
          }));

  srv.Post("/api/sessions/:id/direction",
           guarded([this](const httplib::Request& req, httplib::Response& res, const std::shared_ptr<ManagedSession>& s) {
             store_.set_direction(*s, Direction::from_json(parse_body(req)));
             send_json(res, 200, s->snapshot());
           }));

  srv.Post("/api/sessions/:id/run",
           guarded([this](const httplib::Request& req, httplib::Response& res, const std::shared_ptr<ManagedSession>& s) {
             const auto body = parse_body(req);
             const std::string mode_name = body.value("mode", "step");
             if (mode_name != "step" && mode_name != "auto") fail(ErrorCode::kValidation, "mode must be step or auto");
             const auto mode = mode_name == "auto" ? RunMode::kAuto : RunMode::kStep;
             const auto wait = body.find("wait");
             if (wait != body.end() && !wait->is_boolean()) fail(ErrorCode::kValidation, "wait must be a boolean");
             if (wait == body.end() || wait->get<bool>()) {
               store_.run(*s, mode);
               send_json(res, 200, s->snapshot());
               return;
             }
             std::lock_guard lock(workers_mutex_);
             workers_.emplace_back([this, s, mode] {
               try {
                 store_.run(*s, mode);
               } catch (const std::exception&) {
                 // Recorded in the session itself (Failed stage, failed event).
               }
             });
             send_json(res, 202, {{"id", s->id()}, {"accepted", true}});
           }));

  srv.Post("/api/sessions/:id/reference",
           guarded([this](const httplib::Request& req, httplib::Response& res, const std::shared_ptr<ManagedSession>& s) {
             if (!req.has_file("image")) fail(ErrorCode::kValidation, "multipart field 'image' is required");
             std::optional<RetouchParams> params;
             if (req.has_file("params")) params = from_json(req.get_file_value("params").content).params;
             const auto& file = req.get_file_value("image");
             const auto* data = reinterpret_cast<const std::uint8_t*>(file.content.data());
             auto d = store_.add_reference(*s, {data, file.content.size()}, params);
             send_json(res, 200, {{"source", style_source_name(d.source)}, {"text", d.text}});
           }));

  auto serve_image = [this, require_usable](bool histogram) {
    return [this, histogram, require_usable](const httplib::Request& req, httplib::Response& res,
                                             const std::shared_ptr<ManagedSession>& s) {
      require_usable(*s);
      const auto snap = s->snapshot();
      const auto n = parse_seq(req.path_params.at("n"));
      if (!n) fail(ErrorCode::kNotFound, "iteration must be a non-negative integer");
      std::string digest;
      if (*n == 0) {
        digest = snap.at(histogram ? "source_histogram_digest" : "source_digest").get<std::string>();
      } else {
        const auto& its = snap.at("iterations");
        if (*n > its.size()) fail(ErrorCode::kNotFound, "no iteration " + std::to_string(*n));
        digest = its.at(*n - 1).value(histogram ? "histogram_digest" : "image_digest", "");
      }
      if (digest.empty() || !s->images().contains(digest)) fail(ErrorCode::kNotFound, "image not rendered yet");
      const auto png = s->images().get_png(digest);
      res.set_content(std::string(png.begin(), png.end()), "image/png");
    };
  };
  srv.Get("/api/sessions/:id/iterations/:n/image", guarded(serve_image(false)));
  srv.Get("/api/sessions/:id/iterations/:n/histogram", guarded(serve_image(true)));

  srv.Get("/api/sessions/:id/events",
          guarded([this, require_usable](const httplib::Request& req, httplib::Response& res,
                                         const std::shared_ptr<ManagedSession>& s) {
            require_usable(*s);
            std::uint64_t after = 0;
            std::string resume = req.get_header_value("Last-Event-ID");
            if (resume.empty() && req.has_param("last_event_id")) resume = req.get_param_value("last_event_id");
            if (!resume.empty()) {
              auto v = parse_seq(resume);
              if (!v) fail(ErrorCode::kValidation, "Last-Event-ID must be an event sequence number");
              after = *v;
            }
            res.set_header("Cache-Control", "no-cache");
            auto cursor = std::make_shared<std::uint64_t>(after);
            auto idle = std::make_shared<int>(0);
            res.set_chunked_content_provider(
                "text/event-stream", [this, s, cursor, idle](std::size_t, httplib::DataSink& sink) {
                  if (stopping_) return false;
                  auto& log = s->events();
                  if (!log.wait_for(*cursor, kSsePoll)) {
                    if (log.closed()) {
                      sink.done();
                      return true;
                    }
                    if (++*idle >= kKeepalivePolls) {
                      *idle = 0;
                      const std::string ping = ": keepalive\n\n";
                      if (!sink.write(ping.data(), ping.size())) return false;
                    }
                    return true;
                  }
                  *idle = 0;
                  for (const auto& e : log.since(*cursor)) {
                    const auto frame = sse_frame(e);
                    if (!sink.write(frame.data(), frame.size())) return false;
                    *cursor = e.seq;
                  }
                  if (log.closed() && log.size() <= *cursor) sink.done();
                  return true;
                });
          }));
}

}  // namespace photoart
