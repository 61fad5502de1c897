#include "flightline/service/api_server.hpp"

#include <charconv>
#include <limits>
#include <nlohmann/json.hpp>

#include "flightline/service/udp_listener.hpp"
#include "flightline/storage/record.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a macro named _res.
#include <httplib.h>

namespace flightline::service {

namespace {

constexpr const char* kNdjson = "application/x-ndjson";
constexpr const char* kJson = "application/json";

void error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), kJson);
}

std::optional<std::int64_t> parse_ms(const std::string& s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string records(const std::vector<tracking::TrackPoint>& points) {
  std::string body;
  for (const auto& p : points) body += storage::format_record(p) + "\n";
  return body;
}

std::string sse(const StreamEvent& e) {
  return "id: " + std::to_string(e.seq) + "\nevent: " + (e.replay ? "replay" : "point") + "\ndata: " +
         format_event(e) + "\n\n";
}

}  // namespace

struct ApiServer::Impl {
  Pipeline& pipeline;
  ApiOptions options;
  httplib::Server http;
  std::atomic<bool> stopping{false};

  Impl(Pipeline& p, ApiOptions o) : pipeline(p), options(o) { routes(); }

  std::optional<tracking::AssetId> resolve(const std::string& id) {
    for (const auto& p : pipeline.tracker().snapshot()) {
      if (p.asset.id == id) return p.asset;
    }
    for (const auto kind : {tracking::AssetKind::kPerson, tracking::AssetKind::kSupportEquipment,
                            tracking::AssetKind::kAircraft}) {
      const tracking::AssetId a{kind, id};
      if (pipeline.tracker().knows(a)) return a;
    }
    for (const auto& p : storage::read_log(pipeline.log_path()).records) {
      if (p.asset.id == id) return p.asset;
    }
    return std::nullopt;
  }

  void routes() {
    // Plain SO_REUSEADDR: httplib's default adds SO_REUSEPORT, which would let a
    // second service bind the same port without error.
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    http.Get("/assets", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(records(pipeline.tracker().snapshot()), kNdjson);
    });

    http.Get(R"(/assets/([^/]+)/track)", [this](const httplib::Request& req, httplib::Response& res) {
      std::int64_t from = std::numeric_limits<std::int64_t>::min();
      std::int64_t to = std::numeric_limits<std::int64_t>::max();
      for (auto [key, bound] : {std::pair{"from", &from}, std::pair{"to", &to}}) {
        if (!req.has_param(key)) continue;
        const auto v = parse_ms(req.get_param_value(key));
        if (!v) return error(res, 400, std::string("'") + key + "' is not an integer millisecond timestamp");
        *bound = *v;
      }
      if (from > to) return error(res, 400, "from is after to");
      const std::string id = req.matches[1];
      const auto asset = tracking::is_valid_asset_id(id) ? resolve(id) : std::nullopt;
      if (!asset) return error(res, 404, "unknown asset '" + id + "'");
      res.set_content(records(storage::query(pipeline.log_path(), asset, from, to).records), kNdjson);
    });

    http.Get("/stream", [this](const httplib::Request&, httplib::Response& res) {
      auto sub = pipeline.bus().subscribe();
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream",
          [this, sub, opened = false](std::size_t, httplib::DataSink& sink) mutable {
            if (!opened) {
              opened = true;
              const std::string hello = ": stream open\n\n";
              return sink.write(hello.data(), hello.size());
            }
            const auto deadline = std::chrono::steady_clock::now() + options.heartbeat;
            while (!stopping) {
              const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                  deadline - std::chrono::steady_clock::now());
              if (left.count() <= 0) {
                const std::string beat = ": heartbeat\n\n";
                return sink.write(beat.data(), beat.size());
              }
              if (auto e = sub->pop(std::min(left, std::chrono::milliseconds(200)))) {
                const auto text = sse(*e);
                return sink.write(text.data(), text.size());
              }
              if (sub->overflowed()) return false;  // slow consumer: drop the connection
              if (sub->closed()) break;
            }
            sink.done();
            return true;
          },
          [this, sub](bool) { pipeline.bus().unsubscribe(sub); });
    });

    http.Post("/replay", [this](const httplib::Request& req, httplib::Response& res) {
      storage::ReplayClock clock;
      try {
        const auto body = nlohmann::json::parse(req.body);
        clock.start_ms = body.at("from").get<std::int64_t>();
        clock.end_ms = body.at("to").get<std::int64_t>();
        const auto& rate = body.at("rate");
        if (rate.is_string() && rate.get<std::string>() == "batch") {
          clock.rate = storage::ReplayClock::kBatch;
        } else {
          clock.rate = rate.get<double>();
        }
        storage::validate(clock);
      } catch (const std::exception& e) {
        return error(res, 400, std::string("bad replay request: ") + e.what());
      }
      const auto id = pipeline.start_replay(clock);
      if (!id) return error(res, 409, "a replay session is already active");
      res.status = 202;
      res.set_content(nlohmann::json{{"replay_id", *id}}.dump(), kJson);
    });

    http.Delete("/replay", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(nlohmann::json{{"cancelled", pipeline.cancel_replay()}}.dump(), kJson);
    });

    http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(format_health(pipeline.health()), kJson);
    });
  }
};

ApiServer::ApiServer(Pipeline& pipeline, ApiOptions options)
    : impl_(std::make_unique<Impl>(pipeline, options)) {}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start(const Endpoint& at) {
  int port = at.port;
  if (at.port == 0) {
    port = impl_->http.bind_to_any_port(at.host);
  } else if (!impl_->http.bind_to_port(at.host, at.port)) {
    port = -1;
  }
  if (port <= 0) throw BindError("http " + to_string(at) + ": cannot bind");
  port_ = static_cast<std::uint16_t>(port);
  thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void ApiServer::stop() {
  if (!thread_.joinable()) return;
  impl_->stopping = true;
  impl_->http.stop();
  thread_.join();
}

}  // namespace flightline::service
