#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "agent/runner.hpp"
#include "common/error.hpp"
#include "service/session_store.hpp"

namespace httplib {
class Server;
}

namespace photoart {

int http_status(ErrorCode code);

/// HTTP+JSON facade over a SessionStore with an SSE event stream.
class Service {
 public:
  explicit Service(AppConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds config().host:config().port (port 0 picks a free port) and returns
  // the bound port.
  int bind();
  void listen();  // blocks until stop()
  void start();   // bind (if needed) and listen on a background thread
  void stop();

  int port() const { return port_; }
  SessionStore& store() { return store_; }

 private:
  void routes();

  SessionStore store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;  // run requests with wait=false
  std::atomic<bool> stopping_{false};
  int port_ = -1;
};

}  // namespace photoart
