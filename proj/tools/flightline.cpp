// flightline: serve, simulate, plan-cameras, replay, generate-family.

#include <CLI11.hpp>

#include <charconv>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stop_token>
#include <thread>

#include "flightline/fiducial/tag_family.hpp"
#include "flightline/service/planning.hpp"
#include "flightline/service/service.hpp"
#include "flightline/service/simulation.hpp"
#include "flightline/storage/trajectory_log.hpp"

namespace fs = std::filesystem;
using namespace flightline;

namespace {

// SIGINT/SIGTERM are blocked in every thread and collected here instead.
class SignalWatch {
 public:
  SignalWatch() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    thread_ = std::jthread([this](std::stop_token self) {
      const timespec tick{0, 200'000'000};
      while (!self.stop_requested()) {
        if (sigtimedwait(&set_, nullptr, &tick) > 0) {
          source_.request_stop();
          return;
        }
      }
    });
  }

  std::stop_token token() const { return source_.get_token(); }

  void wait() const {
    while (!source_.stop_requested()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }

 private:
  sigset_t set_{};
  std::stop_source source_;
  std::jthread thread_;
};

int serve(const fs::path& config_path) {
  SignalWatch signals;
  const auto cfg = service::load_service_config(config_path);
  service::Service svc(cfg);
  std::cerr << "flightline: gateways udp " << cfg.gateway_listen.host << ":" << svc.gateway_port() << ", api http "
            << cfg.api_listen.host << ":" << svc.api_port() << ", log " << cfg.log.string() << "\n";
  signals.wait();
  svc.stop();
  std::cerr << "flightline: stopped, " << svc.pipeline().health().log_records << " records logged\n";
  return 0;
}

int simulate(fs::path scenario_path, const fs::path& config_path, double speed, bool overwrite, bool linger) {
  SignalWatch signals;
  const auto cfg = service::load_service_config(config_path);
  if (scenario_path.empty()) scenario_path = cfg.scenario;
  if (scenario_path.empty()) throw service::ConfigError("no scenario given and none in " + config_path.string());
  const auto scenario = service::load_scenario(scenario_path);
  if (fs::exists(cfg.log) && fs::file_size(cfg.log) > 0) {
    if (!overwrite) {
      throw service::ConfigError("log " + cfg.log.string() + " already has records; pass --overwrite to replace it");
    }
    fs::remove(cfg.log);
  }
  service::Service svc(cfg, {.listen_gateways = false, .serve_api = true, .api = {}});
  std::cerr << "flightline: simulating " << scenario.duration_s << " s at " << speed << "x, api http "
            << cfg.api_listen.host << ":" << svc.api_port() << "\n";
  const auto summary =
      service::run_simulation(scenario, svc.cameras(), svc.pipeline(), {.speed = speed, .stop = signals.token()});
  std::cout << service::format_summary(summary);
  const auto broken = summary.violations();
  for (const auto& v : broken) std::cerr << "flightline: counter identity broken: " << v << "\n";
  if (linger && !summary.cancelled) signals.wait();
  svc.stop();
  return broken.empty() ? 0 : 3;
}

int plan(const fs::path& cameras_path, const std::vector<double>& sizes, const std::string& format) {
  const auto cameras = service::load_cameras(cameras_path);
  const auto rows = service::plan_cameras(cameras, sizes);
  std::cout << (format == "records" ? service::format_plan_records(rows) : service::format_plan_table(rows));
  return 0;
}

int replay(const fs::path& log, std::int64_t from, std::int64_t to, const std::string& rate, const fs::path& out) {
  SignalWatch signals;
  double r = storage::ReplayClock::kBatch;
  if (rate != "batch") {
    const auto [ptr, ec] = std::from_chars(rate.data(), rate.data() + rate.size(), r);
    if (ec != std::errc{} || ptr != rate.data() + rate.size()) throw std::invalid_argument("bad --rate '" + rate + "'");
  }
  storage::ReplayClock clock{from, to, r};
  storage::validate(clock);
  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::trunc);
    if (!file) throw storage::StorageError("cannot write " + out.string());
  }
  std::ostream& sink = out.empty() ? std::cout : file;
  const auto summary = storage::replay(
      log, clock, [&](const tracking::TrackPoint& p) { sink << storage::format_record(p) << '\n' << std::flush; },
      signals.token());
  std::cerr << "flightline: replayed " << summary.emitted << " records" << (summary.cancelled ? " (cancelled)" : "")
            << "\n";
  return 0;
}

int generate_family(const fiducial::FamilyParams& params, const fs::path& out) {
  const auto family = fiducial::generate_family(params);
  if (out.empty()) {
    fiducial::write_family(std::cout, family);
  } else {
    std::ofstream file(out);
    fiducial::write_family(file, family);
    if (!file) throw std::runtime_error("cannot write " + out.string());
  }
  std::cerr << "flightline: " << family.codewords.size() << " codewords\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flightline: flight-line asset tracking service"};
  app.require_subcommand(1);

  fs::path config, scenario, cameras, log, out;
  double speed = 1.0;
  bool overwrite = false, linger = false;
  std::vector<double> tag_sizes;
  std::string format = "table", rate = "1";
  std::int64_t from = std::numeric_limits<std::int64_t>::min(), to = std::numeric_limits<std::int64_t>::max();
  fiducial::FamilyParams family;

  auto* serve_cmd = app.add_subcommand("serve", "Run the gateway listener, tracker and API");
  serve_cmd->add_option("--config", config, "Service config (YAML)")->required()->check(CLI::ExistingFile);

  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario against the live pipeline");
  sim_cmd->add_option("--scenario", scenario, "Scenario file (YAML); defaults to the config's scenario")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--config", config, "Service config (YAML)")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--speed", speed, "Simulated seconds per wall second; 0 runs unpaced")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_flag("--overwrite", overwrite, "Replace an existing log");
  sim_cmd->add_flag("--linger", linger, "Keep the API up after the run until interrupted");

  auto* plan_cmd = app.add_subcommand("plan-cameras", "Maximum tag detection distance per camera and tag size");
  plan_cmd->add_option("--cameras", cameras, "Camera definitions (YAML)")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--tag-sizes", tag_sizes, "Tag side lengths in meters")->delimiter(',');
  plan_cmd->add_option("--format", format, "table or records")->check(CLI::IsMember({"table", "records"}));

  auto* replay_cmd = app.add_subcommand("replay", "Replay a trajectory log window into a file");
  replay_cmd->add_option("--log", log, "Trajectory log")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--from", from, "Window start, unix ms");
  replay_cmd->add_option("--to", to, "Window end, unix ms");
  replay_cmd->add_option("--rate", rate, "Playback rate, or 'batch'");
  replay_cmd->add_option("--out", out, "Output file (default stdout)");

  auto* fam_cmd = app.add_subcommand("generate-family", "Generate a rotation-aware tag code family");
  fam_cmd->add_option("--bits", family.code_bits, "Code bits (multiple of 4)");
  fam_cmd->add_option("--min-hamming", family.min_hamming, "Minimum Hamming distance");
  fam_cmd->add_option("--bits-per-width", family.bits_per_width, "Bit cells across the tag");
  fam_cmd->add_option("--max-codewords", family.max_codewords, "Stop after this many codewords");
  fam_cmd->add_option("--seed", family.seed, "Scan seed");
  fam_cmd->add_option("--out", out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(config);
    if (*sim_cmd) return simulate(scenario, config, speed, overwrite, linger);
    if (*plan_cmd) return plan(cameras, tag_sizes, format);
    if (*replay_cmd) return replay(log, from, to, rate, out);
    if (*fam_cmd) return generate_family(family, out);
  } catch (const service::ScenarioError& e) {
    std::cerr << "flightline: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "flightline: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
