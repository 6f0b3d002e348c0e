#include <atomic>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <iostream>
#include <thread>

#include "vizcomp/server.hpp"

namespace vizcomp {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

void reject(tcp::socket& socket, const http::request<http::string_body>& req) {
  http::response<http::string_body> res{http::status::not_found, req.version()};
  res.set(http::field::content_type, "text/plain");
  res.body() = "websocket endpoint is /session\n";
  res.prepare_payload();
  beast::error_code ec;
  http::write(socket, res, ec);
}

void serve_connection(tcp::socket socket) {
  beast::error_code ec;
  beast::flat_buffer buffer;
  http::request<http::string_body> req;
  http::read(socket, buffer, req, ec);
  if (ec) return;
  if (!websocket::is_upgrade(req) || req.target() != "/session") {
    reject(socket, req);
    return;
  }
  websocket::stream<tcp::socket> ws{std::move(socket)};
  ws.accept(req, ec);
  if (ec) return;
  ws.text(true);

  ProtocolSession session(next_session_id());
  for (;;) {
    beast::flat_buffer frame;
    ws.read(frame, ec);
    if (ec) return;  // closed or broken; the session ends with the connection
    for (const auto& reply : session.handle_text(beast::buffers_to_string(frame.data()))) {
      ws.write(asio::buffer(reply), ec);
      if (ec) return;
    }
  }
}

}  // namespace

struct SessionServer::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::atomic<bool> stopping{false};
  unsigned short port = 0;
};

SessionServer::SessionServer(unsigned short port, std::string address) : impl_(std::make_unique<Impl>()) {
  const tcp::endpoint endpoint{asio::ip::make_address(address), port};
  impl_->acceptor.open(endpoint.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(endpoint);
  impl_->acceptor.listen();
  impl_->port = impl_->acceptor.local_endpoint().port();
}

SessionServer::~SessionServer() { stop(); }

unsigned short SessionServer::port() const { return impl_->port; }

void SessionServer::run() {
  while (!impl_->stopping) {
    beast::error_code ec;
    tcp::socket socket{impl_->io};
    impl_->acceptor.accept(socket, ec);
    if (impl_->stopping) break;
    if (!ec) std::thread(serve_connection, std::move(socket)).detach();
  }
  beast::error_code ec;
  impl_->acceptor.close(ec);
}

void SessionServer::stop() {
  if (impl_->stopping.exchange(true)) return;
  // A blocking accept is not woken by close() from another thread, so poke it
  // with a loopback connection and let run() close the acceptor.
  beast::error_code ec;
  tcp::socket poke{impl_->io};
  poke.connect({asio::ip::make_address("127.0.0.1"), impl_->port}, ec);
}

void serve_forever(unsigned short port, std::ostream& log) {
  SessionServer server(port, "0.0.0.0");
  log << "listening on ws://0.0.0.0:" << server.port() << "/session" << std::endl;
  server.run();
}

}  // namespace vizcomp
