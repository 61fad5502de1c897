// Acceptance gate: one PASS/FAIL line per primary criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/scenarios.hpp"
#include "../support/synthetic.hpp"
#include "../support/temp_dir.hpp"
#include "flightline/fiducial/detection_range.hpp"
#include "flightline/fiducial/dlt.hpp"
#include "flightline/fiducial/tag_family.hpp"
#include "flightline/fiducial/tag_pose.hpp"
#include "flightline/lorawan/frame.hpp"
#include "flightline/lorawan/gps_payload.hpp"
#include "flightline/service/service.hpp"
#include "flightline/service/simulation.hpp"
#include "flightline/storage/record.hpp"

// After Eigen: <resolv.h>, pulled in by httplib, defines a macro named _res.
#include <httplib.h>

using namespace flightline;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

double series_tan(double x) {
  // Taylor series to x^9; the argument here is below 0.05, so the truncation error is under 1e-16.
  const double x2 = x * x;
  return x * (1.0 + x2 * (1.0 / 3.0 + x2 * (2.0 / 15.0 + x2 * (17.0 / 315.0 + x2 * (62.0 / 2835.0)))));
}

Outcome formula_fidelity() {
  const fiducial::DistanceQuery q{0.5, 10, 1.2217, 5, 3840};
  const double d = fiducial::max_detection_distance(q);
  const double hand = 0.5 / (2.0 * series_tan(10 * 1.2217 * 5 / (2.0 * 3840)));
  const double rel_hand = std::abs(d - hand) / hand;
  const double rel_paper = std::abs(d - 31.43) / 31.43;

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> t(0.05, 2.0), f(0.3, 2.0), p(2.0, 10.0);
  std::uniform_int_distribution<int> b(6, 14), r(640, 7680), shift(-4, 4);
  int linear = 0;
  for (int i = 0; i < 100; ++i) {
    fiducial::DistanceQuery a{t(rng), b(rng), f(rng), p(rng), r(rng)};
    fiducial::DistanceQuery scaled = a;
    scaled.tag_size_m = std::ldexp(a.tag_size_m, shift(rng));
    const double da = fiducial::max_detection_distance(a);
    const double ds = fiducial::max_detection_distance(scaled);
    if (ds == da * (scaled.tag_size_m / a.tag_size_m)) ++linear;
  }
  return {rel_hand <= 1e-3 && rel_paper <= 1e-3 && linear == 100,
          fmt("d=%.6f m, hand=%.6f m (rel %.1e), vs 31.43 rel %.1e, exact linearity %d/100", d, hand, rel_hand,
              rel_paper, linear)};
}

Outcome pose_round_trip() {
  const auto cam = fiducial::CameraIntrinsics::from_fov(3840, 2160, 1.2217);
  std::mt19937_64 rng(2);
  double worst_t = 0.0, worst_r = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto scene = testing::random_visible_tag(rng, cam, 2.0, 60.0);
    const auto pose = fiducial::pose_from_homography(fiducial::homography_from_corners(scene.detection), cam);
    worst_t = std::max(worst_t, (pose.translation - scene.tag_in_camera.translation).norm());
    worst_r = std::max(worst_r, fiducial::rotation_distance(pose.rotation, scene.tag_in_camera.rotation));
  }
  return {worst_t <= 1e-6 && worst_r <= 1e-6,
          fmt("100 poses, worst translation %.2e m, worst rotation %.2e rad", worst_t, worst_r)};
}

Outcome noise_direction() {
  const auto cam = fiducial::CameraIntrinsics::from_fov(3840, 2160, 1.2217);
  const auto errors_at = [&](double depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<double> err;
    while (err.size() < 200) {
      auto scene = testing::random_visible_tag(rng, cam, depth, depth, 1.0, 1.0, 30.0 * testing::kDeg);
      for (auto& c : scene.detection.corners_px) c += fiducial::Vec2(noise(rng), noise(rng));
      try {
        const auto est = fiducial::estimate_tag_pose(scene.detection, cam);
        err.push_back((est.tag_in_camera.translation - scene.tag_in_camera.translation).norm());
      } catch (const fiducial::FiducialError&) {
        err.push_back(INFINITY);  // a failed estimate counts as unbounded error
      }
    }
    return testing::median(err);
  };
  const double m10 = errors_at(10.0, 3);
  const double m40 = errors_at(40.0, 4);
  return {m40 > m10, fmt("median translation error %.4f m at 10 m, %.4f m at 40 m", m10, m40)};
}

Outcome dlt_recovery() {
  const auto cam = fiducial::CameraIntrinsics::from_focal(1920, 1080, 1000.0);
  const fiducial::Vec3 center(5, -3, 2);
  const auto pose = fiducial::camera_pose_looking(center, 10.0 * testing::kDeg, 5.0 * testing::kDeg);
  std::mt19937_64 rng(5);
  const auto clean = fiducial::dlt_calibrate(testing::survey(cam, pose, 8, rng));
  const double clean_err = (fiducial::to_vec(fiducial::camera_center(clean.projection)) - center).norm();

  std::vector<double> errs;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 r(seed);
    const auto cal = fiducial::dlt_calibrate(testing::survey(cam, pose, 20, r, 0.5));
    errs.push_back((fiducial::to_vec(fiducial::camera_center(cal.projection)) - center).norm());
  }
  const double p95 = testing::percentile(errs, 0.95);
  return {clean_err <= 1e-6 && p95 <= 0.5,
          fmt("noiseless 8 points %.2e m; 20 points at 0.5 px, 95th percentile %.3f m over 100 seeds", clean_err,
              p95)};
}

// Quarter-turn of a b×b-style quadrant layout, written as an explicit bit
// permutation independent of the library's shift-based rotate90.
std::uint64_t rotate_by_permutation(std::uint64_t code, int bits) {
  const int q = bits / 4;
  std::uint64_t out = 0;
  for (int i = 0; i < bits; ++i) {
    if (code >> i & 1) out |= std::uint64_t{1} << ((i + q) % bits);
  }
  return out;
}

Outcome family_soundness() {
  fiducial::FamilyParams params;
  params.code_bits = 16;
  params.min_hamming = 5;
  params.max_codewords = 1000;
  params.seed = 6;
  const auto fam = fiducial::generate_family(params);
  std::vector<std::array<std::uint64_t, 4>> rots;
  bool self_ok = true;
  for (const auto c : fam.codewords) {
    std::array<std::uint64_t, 4> r{c, 0, 0, 0};
    for (int k = 1; k < 4; ++k) r[k] = rotate_by_permutation(r[k - 1], 16);
    for (int k = 1; k < 4; ++k) self_ok &= std::popcount(r[0] ^ r[k]) >= 5;
    rots.push_back(r);
  }
  int min_d = 64;
  for (std::size_t i = 0; i < rots.size(); ++i) {
    for (std::size_t j = i + 1; j < rots.size(); ++j) {
      for (int k = 0; k < 4; ++k) min_d = std::min(min_d, std::popcount(rots[i][0] ^ rots[j][k]));
    }
  }
  return {!fam.codewords.empty() && self_ok && min_d >= 5,
          fmt("%zu codewords, min rotated pairwise distance %d, rotation self-distance %s", fam.codewords.size(),
              min_d, self_ok ? ">= 5" : "VIOLATED")};
}

Outcome wire_robustness() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180), alt(-3000, 3000);
  int round_trips = 0;
  std::vector<lora::Bytes> frames;
  for (int i = 0; i < 1000; ++i) {
    const auto fix = lora::make_gps_fix({lat(rng), lon(rng), alt(rng)}, static_cast<int>(rng() % 101));
    const lora::UplinkFrame up{static_cast<std::uint32_t>(rng()), static_cast<std::uint16_t>(rng()),
                               lora::kGpsFixPort, lora::encode_gps_fix(fix)};
    const lora::GatewayDatagram dg{rng(), static_cast<std::int64_t>(rng() >> 1), lora::encode_uplink(up)};
    const auto back = lora::decode_datagram(lora::encode_datagram(dg));
    const auto frame = lora::decode_uplink(back.frame);
    if (back.gateway_id == dg.gateway_id && back.rx_unix_ms == dg.rx_unix_ms && frame.dev_addr == up.dev_addr &&
        frame.fcnt == up.fcnt && frame.port == up.port && frame.payload == up.payload &&
        lora::decode_gps_fix(frame.payload) == fix) {
      ++round_trips;
    }
    if (frames.size() < 100) frames.push_back(dg.frame);
  }
  std::size_t corruptions = 0, rejected = 0;
  for (const auto& f : frames) {
    for (std::size_t pos = 0; pos < f.size(); ++pos) {
      for (int v = 0; v < 256; ++v) {
        if (v == f[pos]) continue;
        auto bad = f;
        bad[pos] = static_cast<std::uint8_t>(v);
        ++corruptions;
        try {
          lora::decode_uplink(bad);
        } catch (const lora::DecodeError&) {
          ++rejected;
        }
      }
    }
  }
  return {round_trips == 1000 && rejected == corruptions,
          fmt("%d/1000 round trips, %zu/%zu single-byte corruptions of 100 frames rejected", round_trips, rejected,
              corruptions)};
}

// ---------------------------------------------------------------------------

const geo::FrameOrigin kOrigin{testing::kFlightLineOrigin};

std::string serialize(const std::vector<tracking::TrackPoint>& snap) {
  std::string s;
  for (const auto& p : snap) s += storage::format_record(p) + "\n";
  return s;
}

Outcome dedup_exactness() {
  int runs = 0, clean = 0;
  std::string first_problem;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int gateways = 2 + static_cast<int>(seed % 3);
    const auto sc = testing::flight_line(
        {.devices = 22, .gateways = gateways, .loss_prob = 0.05 * static_cast<double>(seed % 6), .duration_s = 600,
         .seed = seed, .range_m = seed % 2 ? 5000.0 : 600.0});
    testing::TempDir dir;
    service::SimSummary s;
    std::map<std::pair<std::string, std::int64_t>, int> commits;
    {
      service::Pipeline pipeline(kOrigin, {}, dir.path() / "t.log");
      pipeline.tracker().add_observer(
          [&](const tracking::TrackPoint& p, std::uint64_t) { ++commits[{p.asset.id, p.timestamp_ms}]; });
      s = service::run_simulation(sc, {}, pipeline, {.speed = 0.0, .stop = {}});
    }
    ++runs;
    auto problems = s.violations();
    std::size_t total = 0;
    for (const auto& [key, n] : commits) {
      total += static_cast<std::size_t>(n);
      if (n != 1) problems.push_back("a frame committed more than once");
    }
    if (total != s.frames_heard) problems.push_back("commits != frames heard by a gateway");
    if (problems.empty()) {
      ++clean;
    } else if (first_problem.empty()) {
      first_problem = fmt("seed %llu: %s", static_cast<unsigned long long>(seed), problems.front().c_str());
    }
  }
  return {clean == runs,
          fmt("%d/%d seeded multi-gateway runs exact and conserved%s%s", clean, runs,
              first_problem.empty() ? "" : "; ", first_problem.c_str())};
}

struct E2E {
  Outcome outcome;
  std::string log;
};

E2E end_to_end() {
  testing::TempDir dir;
  service::ServiceConfig cfg;
  cfg.api_listen = {"127.0.0.1", 0};
  cfg.origin = testing::kFlightLineOrigin;
  cfg.log = dir.path() / "flightline.log";
  const auto sc = testing::flight_line({.devices = 22, .gateways = 2, .loss_prob = 0.1, .duration_s = 600, .seed = 22});

  std::vector<std::string> live;
  service::SimSummary summary;
  std::set<std::string> listed;
  std::size_t asset_lines = 0;
  std::vector<std::string> problems;
  {
    service::Service svc(cfg, {.listen_gateways = false, .serve_api = true, .api = {}});
    auto& tracker = svc.pipeline().tracker();
    tracker.add_observer([&](const tracking::TrackPoint&, std::uint64_t) { live.push_back(serialize(tracker.snapshot())); });
    summary = service::run_simulation(sc, {}, svc.pipeline(), {.speed = 60.0, .stop = {}});

    httplib::Client client("127.0.0.1", svc.api_port());
    const auto res = client.Get("/assets");
    if (!res || res->status != 200) {
      problems.push_back("GET /assets failed");
    } else {
      std::istringstream body(res->body);
      for (std::string line; std::getline(body, line); ++asset_lines) {
        try {
          listed.insert(storage::parse_record(line).asset.id);
        } catch (const std::exception& e) {
          problems.push_back(std::string("/assets line unparseable: ") + e.what());
        }
      }
    }
    svc.stop();
  }
  std::set<std::string> expected;
  for (const auto& d : sc.devices) expected.insert(d.asset->id);
  if (listed != expected || asset_lines != 22) problems.push_back(fmt("/assets lists %zu assets", asset_lines));
  for (const auto& v : summary.violations()) problems.push_back(v);

  const auto log = storage::read_log(cfg.log);
  if (log.malformed_lines != 0 || log.partial_tail || log.records.size() != live.size()) {
    problems.push_back(fmt("log: %zu records, %zu malformed, partial tail %d, %zu live commits", log.records.size(),
                           log.malformed_lines, log.partial_tail, live.size()));
  }
  tracking::Tracker fresh(kOrigin, {});
  std::vector<std::string> replayed;
  storage::replay(cfg.log,
                  {std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max(),
                   storage::ReplayClock::kBatch},
                  [&](const tracking::TrackPoint& p) {
                    fresh.ingest_point(p);
                    replayed.push_back(serialize(fresh.snapshot()));
                  });
  const bool identical = replayed == live;
  if (!identical) problems.push_back("replayed snapshot stream differs from live");
  return {{problems.empty(),
           fmt("%zu/22 assets on /assets, %zu log records, replay snapshots %s (%zu steps)%s%s", listed.size(),
               log.records.size(), identical ? "byte-identical" : "DIFFER", live.size(),
               problems.empty() ? "" : "; ", problems.empty() ? "" : problems.front().c_str())},
          testing::slurp(cfg.log)};
}

Outcome deterministic_replay(const std::string& paced_log) {
  const auto sc = testing::flight_line({.devices = 22, .gateways = 2, .loss_prob = 0.1, .duration_s = 600, .seed = 22});
  std::vector<std::string> logs;
  for (int i = 0; i < 2; ++i) {
    testing::TempDir dir;
    {
      service::Pipeline pipeline(kOrigin, {}, dir.path() / "t.log");
      service::run_simulation(sc, {}, pipeline, {.speed = 0.0, .stop = {}});
    }
    logs.push_back(testing::slurp(dir.path() / "t.log"));
  }
  const bool same = !logs[0].empty() && logs[0] == logs[1];
  const bool same_as_paced = logs[0] == paced_log;
  return {same && same_as_paced, fmt("two unpaced runs %s (%zu bytes); identical to the 60x run: %s",
                                     same ? "byte-identical" : "DIFFER", logs[0].size(), same_as_paced ? "yes" : "no")};
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](const char* name, double limit_s, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_time = limit_s <= 0.0 || secs < limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string budget = limit_s > 0.0 ? fmt(" < %.0f s", limit_s) : std::string();
    std::printf("%s  %-28s %s [%.2f s%s%s]\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs, budget.c_str(),
                in_time ? "" : " EXCEEDED");
    std::fflush(stdout);
  };

  report("formula-fidelity", 1, formula_fidelity);
  report("pose-round-trip", 5, pose_round_trip);
  report("distance-uncertainty", 10, noise_direction);
  report("dlt-recovery", 10, dlt_recovery);
  report("family-soundness", 10, family_soundness);
  report("wire-robustness", 5, wire_robustness);
  report("dedup-exactness", 0, dedup_exactness);
  std::string paced_log;
  report("end-to-end-22-assets", 60, [&] {
    auto r = end_to_end();
    paced_log = std::move(r.log);
    return r.outcome;
  });
  report("deterministic-replay", 0, [&] { return deterministic_replay(paced_log); });

  std::printf("%s: %d of 9 criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
