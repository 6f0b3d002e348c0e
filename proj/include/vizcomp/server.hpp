#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vizcomp/intent.hpp"
#include "vizcomp/io.hpp"

namespace vizcomp {

inline constexpr int kProtocolVersion = 1;

/// Protocol state of one connection. Messages in and out are JSON objects
/// with a "kind" field:
///   client: hello{protocolVersion}, load{manifest}, event{event}
///   server: welcome{sessionId, protocolVersion}, state{state},
///           candidates{candidates}, committed{composite}, error{code, message}
/// Error codes are out-of-order, bad-event and no-manifest; the session stays
/// usable after any error.
class ProtocolSession {
 public:
  explicit ProtocolSession(std::string id);

  std::vector<Json> handle(const Json& message);
  /// Same as handle for one text frame; replies are canonical JSON text.
  std::vector<std::string> handle_text(std::string_view frame);

  const std::string& id() const { return id_; }
  const std::optional<SessionState>& state() const { return state_; }

 private:
  std::vector<Json> applied(const SessionState& next, bool event);

  std::string id_;
  bool greeted_ = false;
  std::optional<SessionState> state_;
};

/// Fresh session ids "s1", "s2", ... unique within the process.
std::string next_session_id();

/// WebSocket server accepting connections on /session, one thread and one
/// session per connection.
class SessionServer {
 public:
  /// Binds to 127.0.0.1 on `port`; 0 picks a free port.
  explicit SessionServer(unsigned short port, std::string address = "127.0.0.1");
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  unsigned short port() const;
  /// Accepts connections until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs a server on all interfaces until the process is terminated.
void serve_forever(unsigned short port, std::ostream& log);

}  // namespace vizcomp
