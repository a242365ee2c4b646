#include "gripsim/gateway/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace gripsim::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

void write_event_log(const std::filesystem::path& dir, const harness::Scenario& s) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path target = dir / (s.name + ".json");
  const std::filesystem::path tmp = dir / (s.name + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoFailure(tmp.string(), "cannot open for writing", IoFailure::Op::Write);
    out << harness::scenario_to_json(s).dump(2) << '\n';
    if (!out) throw IoFailure(tmp.string(), "write failed", IoFailure::Op::Write);
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoFailure(target.string(), ec.message(), IoFailure::Op::Write);
}

namespace {

class LiveSession;

class Registry {
 public:
  void add(const std::string& id, std::shared_ptr<LiveSession> s) {
    std::lock_guard lock(mu_);
    sessions_[id] = std::move(s);
  }
  std::shared_ptr<LiveSession> find(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }
  void remove(const std::string& id) {
    std::lock_guard lock(mu_);
    sessions_.erase(id);
  }
  std::vector<std::shared_ptr<LiveSession>> all() {
    std::lock_guard lock(mu_);
    std::vector<std::shared_ptr<LiveSession>> out;
    for (auto& [_, s] : sessions_) out.push_back(s);
    return out;
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
};

/// One websocket client. Reads run on the connection's strand; writes are
/// queued through send() from any thread.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  using Attach = std::function<void(std::shared_ptr<Connection>, const std::string& target)>;

  Connection(tcp::socket socket, Attach attach)
      : ws_(std::move(socket)), attach_(std::move(attach)) {}

  void start() {
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->read_request(); });
  }

  void bind(std::shared_ptr<LiveSession> s);

  void send(std::string text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      if (self->closed_) return;
      if (self->outbox_.size() >= kMaxQueued) {
        // Consumer cannot keep up; drop the connection rather than buffer forever.
        self->close();
        return;
      }
      self->outbox_.push_back(std::move(text));
      if (self->outbox_.size() == 1) self->write_next();
    });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      self->closed_ = true;
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
      beast::get_lowest_layer(self->ws_).close();
    });
  }

 private:
  static constexpr std::size_t kMaxQueued = 16384;

  void read_request() {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->on_request();
                     });
  }

  void on_request() {
    if (!websocket::is_upgrade(request_)) {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::upgrade_required,
                                                                      request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "gripsim gateway: connect with a WebSocket client\n";
      res->prepare_payload();
      http::async_write(ws_.next_layer(), *res,
                        [self = shared_from_this(), res](beast::error_code, std::size_t) {
                          beast::error_code ec;
                          self->ws_.next_layer().socket().shutdown(tcp::socket::shutdown_both, ec);
                        });
      return;
    }
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->ws_.text(true);
      self->attach_(self, std::string(self->request_.target()));
      self->read_next();
    });
  }

  void read_next() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec);

  void write_next() {
    ws_.async_write(net::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->outbox_.clear();
                        return;
                      }
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->write_next();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::deque<std::string> outbox_;
  Attach attach_;
  std::shared_ptr<LiveSession> session_;
  std::uint64_t seq_ = 0;
  bool closed_ = false;
};

/// Owns one Session and its paced clock. Everything touching the Session
/// runs on `strand_`; connections talk to it only through posted messages.
class LiveSession : public std::enable_shared_from_this<LiveSession> {
 public:
  LiveSession(net::io_context& ioc, Session session, const ServerOptions& opts, Registry& registry)
      : strand_(net::make_strand(ioc)),
        timer_(strand_),
        session_(std::move(session)),
        opts_(opts),
        registry_(registry),
        period_(std::chrono::microseconds(session_.config().tick_period_us)) {}

  const std::string& id() const { return session_.id(); }

  void attach(std::shared_ptr<Connection> conn) {
    net::post(strand_, [self = shared_from_this(), conn = std::move(conn)] {
      self->subscribers_[conn.get()] = {conn, 0};
      conn->send(json{{"type", "session"},
                      {"id", self->session_.id()},
                      {"tick", self->session_.tick()},
                      {"tick_period_us", self->session_.config().tick_period_us},
                      {"paused", self->session_.paused()}}
                     .dump());
    });
  }

  void detach(Connection* conn) {
    net::post(strand_, [self = shared_from_this(), conn] {
      self->subscribers_.erase(conn);
      if (!self->subscribers_.empty()) return;
      self->stop_clock();
      self->flush_logs(true);
      self->registry_.remove(self->session_.id());
    });
  }

  void deliver(std::shared_ptr<Connection> conn, std::string text, std::uint64_t seq) {
    net::post(strand_, [self = shared_from_this(), conn = std::move(conn), text = std::move(text),
                        seq] { self->apply(conn, text, seq); });
  }

  /// On the strand, or once the io_context has stopped.
  void flush_logs(bool include_open_segment) {
    if (!opts_.event_log_dir) return;
    std::vector<harness::Scenario> segments = session_.take_finished_segments();
    if (include_open_segment) {
      if (auto log = session_.event_log()) segments.push_back(std::move(*log));
    }
    for (const harness::Scenario& s : segments) {
      try {
        write_event_log(*opts_.event_log_dir, s);
      } catch (const std::exception& e) {
        std::cerr << "gripsim: event log: " << e.what() << '\n';
      }
    }
  }

 private:
  struct Subscriber {
    std::weak_ptr<Connection> conn;
    std::int64_t decimation = 0;  // 0: not subscribed
  };

  void apply(const std::shared_ptr<Connection>& conn, const std::string& text, std::uint64_t seq) {
    try {
      json msg;
      try {
        msg = json::parse(text);
      } catch (const json::parse_error& e) {
        throw GatewayError(ErrorCode::MalformedMessage, e.what());
      }
      const Effect effect = session_.handle(msg);
      switch (effect.kind) {
        case Effect::Kind::Subscribe:
          subscribers_[conn.get()].decimation = effect.decimation;
          break;
        case Effect::Kind::Resume:
          start_clock();
          break;
        case Effect::Kind::Pause:
          stop_clock();
          break;
        case Effect::Kind::Reset:
        case Effect::Kind::Reconfigured:
          period_ = std::chrono::microseconds(session_.config().tick_period_us);
          if (!session_.paused()) {
            stop_clock();
            start_clock();
          }
          flush_logs(false);
          break;
        case Effect::Kind::None:
          break;
      }
      conn->send(ack_message(seq).dump());
    } catch (const GatewayError& e) {
      conn->send(error_message(e.code(), e.detail(), seq).dump());
    }
  }

  void start_clock() {
    running_ = true;
    anchor_ = Clock::now();
    done_ = 0;
    arm(++generation_);
  }

  void stop_clock() {
    running_ = false;
    ++generation_;
    timer_.cancel();
  }

  void arm(std::uint64_t gen) {
    timer_.expires_at(anchor_ + period_ * (done_ + 1));
    timer_.async_wait([self = shared_from_this(), gen](beast::error_code ec) {
      if (ec || gen != self->generation_ || !self->running_) return;
      self->on_timer(gen);
    });
  }

  void on_timer(std::uint64_t gen) {
    const auto elapsed = Clock::now() - anchor_;
    const std::int64_t due = elapsed / period_ - done_;
    const std::int64_t n = std::min<std::int64_t>(due, opts_.max_catchup_ticks);
    for (std::int64_t i = 0; i < n; ++i) {
      if (!tick_once()) return;
    }
    done_ += n;
    if (due > opts_.max_catchup_ticks) {
      // Host fell behind: count it and re-anchor instead of bursting.
      ++underruns_;
      anchor_ = Clock::now();
      done_ = 0;
    }
    arm(gen);
  }

  bool tick_once() {
    harness::TraceRecord r;
    try {
      r = session_.step();
    } catch (const std::exception& e) {
      stop_clock();
      session_.handle(json{{"type", "pause"}});
      broadcast(error_message(ErrorCode::SimulationFault, e.what()).dump(), true);
      return false;
    }
    std::string frame;
    for (auto it = subscribers_.begin(); it != subscribers_.end();) {
      auto conn = it->second.conn.lock();
      if (!conn) {
        it = subscribers_.erase(it);
        continue;
      }
      const std::int64_t d = it->second.decimation;
      if (d > 0 && r.tick % d == 0) {
        if (frame.empty()) frame = state_frame(r, underruns_).dump();
        conn->send(frame);
      }
      ++it;
    }
    return true;
  }

  void broadcast(const std::string& text, bool all) {
    for (auto& [_, sub] : subscribers_) {
      if (auto conn = sub.conn.lock(); conn && (all || sub.decimation > 0)) conn->send(text);
    }
  }

  net::strand<net::io_context::executor_type> strand_;
  net::steady_timer timer_;
  Session session_;
  const ServerOptions& opts_;
  Registry& registry_;
  std::chrono::microseconds period_;
  std::map<Connection*, Subscriber> subscribers_;
  bool running_ = false;
  Clock::time_point anchor_;
  std::int64_t done_ = 0;
  std::uint64_t generation_ = 0;
  std::uint64_t underruns_ = 0;
};

void Connection::bind(std::shared_ptr<LiveSession> s) { session_ = std::move(s); }

void Connection::on_read(beast::error_code ec) {
  if (ec) {
    closed_ = true;
    if (session_) session_->detach(this);
    session_.reset();
    return;
  }
  std::string text = beast::buffers_to_string(buffer_.data());
  buffer_.consume(buffer_.size());
  ++seq_;
  if (session_) session_->deliver(shared_from_this(), std::move(text), seq_);
  read_next();
}

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions o) : opts(std::move(o)), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      auto conn = std::make_shared<Connection>(
          std::move(socket),
          [this](std::shared_ptr<Connection> c, const std::string& target) { attach(c, target); });
      conn->start();
      accept();
    });
  }

  void attach(const std::shared_ptr<Connection>& conn, std::string target) {
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    std::shared_ptr<LiveSession> live;
    if (target == "/" || target == "/session" || target == "/session/") {
      Session core(ids.next(), opts.base);
      live = std::make_shared<LiveSession>(ioc, std::move(core), opts, registry);
      registry.add(live->id(), live);
    } else if (target.starts_with("/session/")) {
      live = registry.find(target.substr(std::string("/session/").size()));
    }
    if (!live) {
      conn->send(error_message(ErrorCode::UnknownSession, "no live session at " + target).dump());
      conn->close();
      return;
    }
    conn->bind(live);
    live->attach(conn);
  }

  ServerOptions opts;
  net::io_context ioc;
  tcp::acceptor acceptor;
  Registry registry;
  SessionIds ids;
  std::vector<std::thread> workers;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> guard;
  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;
};

Server::Server(ServerOptions opts) : impl_(std::make_unique<Impl>(std::move(opts))) {
  // Live input comes from the console, so the base must not carry events or trace sources.
  impl_->opts.base = live_config(impl_->opts.base, nullptr);
}

Server::~Server() { stop(); }

std::uint16_t Server::start() {
  Impl& s = *impl_;
  const tcp::endpoint ep(net::ip::make_address(s.opts.address), s.opts.port);
  s.acceptor.open(ep.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(ep);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  s.accept();
  s.guard.emplace(s.ioc.get_executor());
  for (unsigned i = 0; i < std::max(1U, s.opts.threads); ++i)
    s.workers.emplace_back([&s] { s.ioc.run(); });
  return s.acceptor.local_endpoint().port();
}

void Server::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait(lock, [this] { return impl_->stopped; });
}

void Server::stop() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.mu);
    if (s.stopped) return;
    s.stopped = true;
  }
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
  });
  s.guard.reset();
  s.ioc.stop();
  for (std::thread& t : s.workers)
    if (t.joinable()) t.join();
  for (const auto& live : s.registry.all()) live->flush_logs(true);
  s.cv.notify_all();
}

}  // namespace gripsim::gateway
