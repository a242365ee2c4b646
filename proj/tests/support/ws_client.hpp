#pragma once
// Minimal blocking WebSocket client for driving the gateway from tests. Every
// operation runs the client's own io_context with a deadline, so a stuck
// server fails the test instead of hanging it.

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace gripsim::testing {

class WsClient {
 public:
  using json = nlohmann::json;

  WsClient(std::uint16_t port, const std::string& target,
           std::chrono::milliseconds timeout = std::chrono::seconds(10))
      : ws_(ioc_), timeout_(timeout) {
    namespace net = boost::asio;
    net::ip::tcp::endpoint ep(net::ip::make_address("127.0.0.1"), port);
    bool done = false;
    boost::beast::error_code result;
    boost::beast::get_lowest_layer(ws_).async_connect(ep, [&](boost::beast::error_code ec) {
      if (ec) {
        result = ec;
        done = true;
        return;
      }
      ws_.async_handshake("127.0.0.1", target, [&](boost::beast::error_code ec2) {
        result = ec2;
        done = true;
      });
    });
    run_until(done, "connect");
    if (result) throw std::runtime_error("websocket connect: " + result.message());
    ws_.text(true);
  }

  void send(const json& msg) { send_text(msg.dump()); }

  void send_text(const std::string& text) {
    bool done = false;
    boost::beast::error_code result;
    ws_.async_write(boost::asio::buffer(text), [&](boost::beast::error_code ec, std::size_t) {
      result = ec;
      done = true;
    });
    run_until(done, "write");
    if (result) throw std::runtime_error("websocket write: " + result.message());
  }

  /// Next message, or nothing if the server closed the connection.
  std::optional<json> recv() {
    bool done = false;
    boost::beast::error_code result;
    buffer_.clear();
    ws_.async_read(buffer_, [&](boost::beast::error_code ec, std::size_t) {
      result = ec;
      done = true;
    });
    run_until(done, "read");
    if (result) return std::nullopt;
    return json::parse(boost::beast::buffers_to_string(buffer_.data()));
  }

  json recv_required() {
    auto m = recv();
    if (!m) throw std::runtime_error("connection closed while waiting for a message");
    return *m;
  }

  /// Reads until `pred` accepts a message, handing every message to `seen` first.
  json recv_until(const std::function<bool(const json&)>& pred,
                  const std::function<void(const json&)>& seen = {}) {
    for (;;) {
      json m = recv_required();
      if (seen) seen(m);
      if (pred(m)) return m;
    }
  }

  void close() {
    bool done = false;
    ws_.async_close(boost::beast::websocket::close_code::normal,
                    [&](boost::beast::error_code) { done = true; });
    run_until(done, "close");
  }

 private:
  void run_until(bool& done, const char* what) {
    ioc_.restart();
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (!done && std::chrono::steady_clock::now() < deadline) {
      ioc_.run_one_for(deadline - std::chrono::steady_clock::now());
    }
    if (!done) {
      boost::beast::get_lowest_layer(ws_).close();
      ioc_.restart();
      ioc_.run_for(std::chrono::milliseconds(100));
      throw std::runtime_error(std::string("websocket ") + what + " timed out");
    }
  }

  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::beast::tcp_stream> ws_;
  boost::beast::flat_buffer buffer_;
  std::chrono::milliseconds timeout_;
};

}  // namespace gripsim::testing
