#include <atomic>

#include "vizcomp/error.hpp"
#include "vizcomp/server.hpp"

namespace vizcomp {

namespace {

Json error_message(std::string_view code, const std::string& message) {
  return {{"kind", "error"}, {"code", code}, {"message", message}};
}

}  // namespace

std::string next_session_id() {
  static std::atomic<unsigned long> counter{0};
  return "s" + std::to_string(++counter);
}

ProtocolSession::ProtocolSession(std::string id) : id_(std::move(id)) {}

std::vector<Json> ProtocolSession::applied(const SessionState& next, bool event) {
  state_ = next;
  std::vector<Json> out;
  out.push_back({{"kind", "state"}, {"state", state_json(next)}});
  if (!next.preview.empty()) out.push_back({{"kind", "candidates"}, {"candidates", to_json(next.preview)}});
  if (event && next.lastCommand) {
    if (const auto* c = std::get_if<ComposeCommand>(&*next.lastCommand)) {
      out.push_back({{"kind", "committed"}, {"composite", to_json(c->spec)}});
    }
  }
  return out;
}

std::vector<Json> ProtocolSession::handle(const Json& message) {
  if (!message.is_object() || !message.contains("kind") || !message["kind"].is_string()) {
    return {error_message("bad-event", "messages are objects with a string \"kind\"")};
  }
  const auto kind = message["kind"].get<std::string>();
  if (kind == "hello") {
    if (greeted_) return {error_message("out-of-order", "hello was already received")};
    const auto it = message.find("protocolVersion");
    if (it == message.end() || !it->is_number_integer() || it->get<int>() != kProtocolVersion) {
      return {error_message("bad-event", "protocolVersion must be 1")};
    }
    greeted_ = true;
    return {{{"kind", "welcome"}, {"sessionId", id_}, {"protocolVersion", kProtocolVersion}}};
  }
  if (!greeted_) return {error_message("out-of-order", "hello must come first")};

  if (kind == "load") {
    const auto it = message.find("manifest");
    if (it == message.end()) return {error_message("no-manifest", "load carries no manifest")};
    try {
      return applied(make_session(load_manifest(it->dump())), false);
    } catch (const std::exception& e) {
      return {error_message("no-manifest", e.what())};
    }
  }
  if (kind == "event") {
    if (!state_) return {error_message("no-manifest", "load a manifest before sending events")};
    const auto it = message.find("event");
    if (it == message.end()) return {error_message("bad-event", "event message carries no event")};
    InteractionEvent event;
    try {
      event = event_from_json(*it, "event");
    } catch (const std::exception& e) {
      return {error_message("bad-event", e.what())};
    }
    if (state_->lastT && event.t < *state_->lastT) {
      return {error_message("out-of-order", "event time precedes the previous event")};
    }
    try {
      return applied(step(*state_, event), true);
    } catch (const std::exception& e) {
      return {error_message("bad-event", e.what())};
    }
  }
  return {error_message("bad-event", "unknown message kind " + kind)};
}

std::vector<std::string> ProtocolSession::handle_text(std::string_view frame) {
  Json message;
  try {
    message = Json::parse(frame.begin(), frame.end());
  } catch (const Json::parse_error& e) {
    return {canonical(error_message("bad-event", e.what()))};
  }
  std::vector<std::string> out;
  for (const auto& reply : handle(message)) out.push_back(canonical(reply));
  return out;
}

}  // namespace vizcomp
