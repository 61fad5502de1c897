#include <gtest/gtest.h>

#include "../support/synthetic.hpp"
#include "../support/temp_dir.hpp"
#include "flightline/fiducial/dlt.hpp"
#include "flightline/service/config.hpp"
#include "flightline/service/event_bus.hpp"
#include "flightline/service/planning.hpp"
#include "flightline/service/scenario.hpp"
#include "flightline/storage/record.hpp"

namespace flightline::service {
namespace {

using testing::TempDir;

TEST(Endpoint, ParsesHostPort) {
  const auto e = parse_endpoint("0.0.0.0:1700");
  EXPECT_EQ(e.host, "0.0.0.0");
  EXPECT_EQ(e.port, 1700);
  EXPECT_EQ(parse_endpoint("::1:0").host, "::1");
  EXPECT_THROW(parse_endpoint("localhost"), ConfigError);
  EXPECT_THROW(parse_endpoint("localhost:70000"), ConfigError);
  EXPECT_THROW(parse_endpoint("localhost:12ab"), ConfigError);
  EXPECT_THROW(parse_endpoint(":80"), ConfigError);
}

TEST(ServiceConfig, ResolvesPathsAgainstConfigDirectory) {
  TempDir dir;
  dir.write("bindings.txt", "device 1 person P1\n");
  const auto path = dir.write("svc.yaml",
                              "gateway_listen: 127.0.0.1:0\n"
                              "api_listen: 127.0.0.1:0\n"
                              "origin: {lat: 36.82, lon: -76.03, alt: 5}\n"
                              "bindings: bindings.txt\n"
                              "log: out/track.log\n");
  const auto cfg = load_service_config(path);
  EXPECT_EQ(cfg.bindings, dir.path() / "bindings.txt");
  EXPECT_EQ(cfg.log, dir.path() / "out/track.log");
  EXPECT_EQ(cfg.api_listen.port, 0);
  EXPECT_DOUBLE_EQ(cfg.origin.alt_m, 5.0);
  EXPECT_TRUE(cfg.cameras.empty());
}

TEST(ServiceConfig, ErrorsNameFileAndLine) {
  TempDir dir;
  const auto missing_origin = dir.write("a.yaml", "log: x.log\n");
  EXPECT_THROW(load_service_config(missing_origin), ConfigError);

  const auto bad_port = dir.write("b.yaml",
                                  "origin: {lat: 0, lon: 0}\n"
                                  "log: x.log\n"
                                  "api_listen: nowhere\n");
  try {
    load_service_config(bad_port);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("b.yaml:3"), std::string::npos) << e.what();
  }
  const auto polar = dir.write("c.yaml", "origin: {lat: 89.95, lon: 0}\nlog: x.log\n");
  EXPECT_THROW(load_service_config(polar), ConfigError);
  const auto unreadable = dir.write("d.yaml", "origin: {lat: 0, lon: 0}\nlog: x.log\nbindings: nope.txt\n");
  EXPECT_THROW(load_service_config(unreadable), ConfigError);
  EXPECT_THROW(load_service_config(dir.path() / "absent.yaml"), ConfigError);
}

TEST(Cameras, PoseAndDltCalibrationAgree) {
  // Survey points seen by a known camera; the DLT path must land on the same pose.
  const auto cam = testing::uhd_camera();
  const auto truth = fiducial::camera_pose_looking(fiducial::Vec3(3, -50, 7), 10 * testing::kDeg, 4 * testing::kDeg);
  std::string yaml =
      "cameras:\n"
      "  - id: posed\n    resolution: [3840, 2160]\n    hfov_deg: 70\n"
      "    pose: {east: 3, north: -50, up: 7, yaw_deg: 10, pitch_deg: 4}\n"
      "  - id: surveyed\n    resolution: [3840, 2160]\n    hfov_deg: 70\n    pixels_per_bit: 4\n"
      "    calibration_points:\n";
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> e(-30, 30), n(-20, 40), u(0, 12);
  int added = 0;
  while (added < 12) {
    const fiducial::Vec3 w(e(rng), n(rng), u(rng));
    const auto px = fiducial::ProjectionMatrix::from_camera(cam, truth).project(w);
    if (!px || !cam.in_frame(*px)) continue;
    char line[200];
    std::snprintf(line, sizeof line, "      - {east: %.17g, north: %.17g, up: %.17g, pixel: [%.17g, %.17g]}\n", w.x(),
                  w.y(), w.z(), px->x(), px->y());
    yaml += line;
    ++added;
  }
  TempDir dir;
  const auto defs = load_cameras(dir.write("cams.yaml", yaml));
  ASSERT_EQ(defs.size(), 2u);
  EXPECT_FALSE(defs[0].calibration_rms_px);
  ASSERT_TRUE(defs[1].calibration_rms_px);
  EXPECT_LT(*defs[1].calibration_rms_px, 1e-6);
  EXPECT_EQ(defs[1].pixels_per_bit, 4.0);
  for (const auto& d : defs) {
    EXPECT_LT((d.pose.translation - truth.translation).norm(), 1e-6) << d.id;
    EXPECT_LT(fiducial::rotation_distance(d.pose.rotation, truth.rotation), 1e-6) << d.id;
  }
}

TEST(Cameras, RejectsIncompleteDefinitions) {
  TempDir dir;
  EXPECT_THROW(load_cameras(dir.write("a.yaml", "cameras:\n  - {id: c, resolution: [640, 480]}\n")), ConfigError);
  EXPECT_THROW(load_cameras(dir.write("b.yaml", "cameras:\n  - {id: c, resolution: [640, 480], hfov_deg: 60}\n")),
               ConfigError);
  const auto coplanar = dir.write("c.yaml",
                                  "cameras:\n  - id: c\n    resolution: [640, 480]\n    hfov_deg: 60\n"
                                  "    calibration_points:\n"
                                  "      - {east: 0, north: 5, up: 0, pixel: [1, 2]}\n"
                                  "      - {east: 1, north: 5, up: 0, pixel: [3, 2]}\n"
                                  "      - {east: 2, north: 6, up: 0, pixel: [5, 1]}\n"
                                  "      - {east: 0, north: 7, up: 0, pixel: [1, 7]}\n"
                                  "      - {east: 3, north: 5, up: 0, pixel: [8, 2]}\n"
                                  "      - {east: 1, north: 9, up: 0, pixel: [4, 5]}\n");
  EXPECT_THROW(load_cameras(coplanar), ConfigError);
  const auto dup = dir.write("d.yaml",
                             "cameras:\n"
                             "  - {id: c, resolution: [640, 480], hfov_deg: 60, pose: {east: 0, north: 0, up: 0, yaw_deg: 0}}\n"
                             "  - {id: c, resolution: [640, 480], hfov_deg: 60, pose: {east: 0, north: 0, up: 0, yaw_deg: 0}}\n");
  EXPECT_THROW(load_cameras(dup), ConfigError);
}

constexpr const char* kScenario = R"(start_unix_ms: 1700000000000
duration_s: 60
gateways:
  - {id: 1, position: {lat: 36.82, lon: -76.03}, loss_prob: 0.1}
devices:
  - dev_addr: 0x10
    asset: {kind: person, id: P1}
    waypoints:
      - {t: 0, east: 0, north: 0}
      - {t: 60, east: 60, north: 0}
aircraft:
  - tag_id: 4
    tag_size_m: 0.8
    waypoints: [{t: 0, east: 1, north: 2, up: 3}]
cameras:
  - {id: cam, noise_px: 0.5}
)";

TEST(Scenario, LoadsAllSections) {
  TempDir dir;
  const auto sc = load_scenario(dir.write("s.yaml", kScenario));
  EXPECT_EQ(sc.start_unix_ms, 1700000000000);
  ASSERT_EQ(sc.gateways.size(), 1u);
  EXPECT_EQ(sc.gateways[0].rng_seed, 1u);  // defaults to the gateway id
  ASSERT_EQ(sc.devices.size(), 1u);
  EXPECT_EQ(sc.devices[0].dev_addr, 0x10u);
  EXPECT_EQ(sc.devices[0].fix_interval_s, 10.0);
  EXPECT_EQ(sc.devices[0].asset->id, "P1");
  ASSERT_EQ(sc.aircraft.size(), 1u);
  EXPECT_FALSE(sc.aircraft[0].asset);
  EXPECT_EQ(sc.cameras.at(0).camera_id, "cam");
}

TEST(Scenario, ListsEveryProblemWithLineNumbers) {
  TempDir dir;
  const auto path = dir.write("bad.yaml",
                              "start_unix_ms: 0\n"
                              "duration_s: 60\n"
                              "gateways:\n"
                              "  - {id: 1, position: {lat: 36.8, lon: -76.0}, loss_prob: 1.5}\n"
                              "devices:\n"
                              "  - dev_addr: 1\n"
                              "    asset: {kind: robot, id: R1}\n"
                              "    waypoints: [{t: 0, east: 0, north: 0}]\n"
                              "  - dev_addr: 2\n"
                              "    waypoints: [{t: 5, east: 0, north: 0}, {t: 5, east: 1, north: 0}]\n"
                              "  - dev_addr: 2\n"
                              "    waypoints: [{t: 0, east: 0, north: 0}]\n");
  try {
    load_scenario(path);
    FAIL();
  } catch (const ScenarioError& e) {
    const auto& issues = e.issues();
    ASSERT_EQ(issues.size(), 4u) << e.what();
    EXPECT_NE(issues[0].find("bad.yaml:4"), std::string::npos) << issues[0];
    EXPECT_NE(issues[1].find("bad.yaml:7"), std::string::npos) << issues[1];
    EXPECT_NE(issues[2].find("bad.yaml:10"), std::string::npos) << issues[2];
    EXPECT_NE(issues[3].find("bad.yaml:11"), std::string::npos) << issues[3];
  }
}

TEST(Scenario, PathInterpolatesAndHolds) {
  const std::vector<Waypoint> path{{0, {0, 0, 0}}, {10, {10, 20, 2}}, {20, {10, 20, 2}}};
  EXPECT_EQ(position_at(path, -5).east_m, 0.0);
  const auto mid = position_at(path, 2.5);
  EXPECT_DOUBLE_EQ(mid.east_m, 2.5);
  EXPECT_DOUBLE_EQ(mid.north_m, 5.0);
  EXPECT_DOUBLE_EQ(mid.up_m, 0.5);
  EXPECT_EQ(position_at(path, 99).north_m, 20.0);
}

tracking::TrackPoint point(std::int64_t ts) {
  return {tracking::AssetId{tracking::AssetKind::kPerson, "P1"}, geo::GeoPoint{1, 2, 3}, tracking::Source::kGpsLora,
          ts, std::nullopt};
}

TEST(EventBus, DeliversInPublishOrder) {
  EventBus bus(16);
  auto a = bus.subscribe();
  auto b = bus.subscribe();
  for (std::uint64_t i = 1; i <= 10; ++i) bus.publish({i, false, 0, point(static_cast<std::int64_t>(i))});
  for (auto& s : {a, b}) {
    for (std::uint64_t i = 1; i <= 10; ++i) {
      const auto e = s->pop(std::chrono::milliseconds(10));
      ASSERT_TRUE(e);
      EXPECT_EQ(e->seq, i);
    }
    EXPECT_FALSE(s->pop(std::chrono::milliseconds(1)));
  }
}

TEST(EventBus, SlowConsumerIsDisconnectedOthersUnaffected) {
  EventBus bus(4);
  auto slow = bus.subscribe();
  auto fast = bus.subscribe();
  for (std::uint64_t i = 1; i <= 6; ++i) {
    bus.publish({i, false, 0, point(1)});
    ASSERT_TRUE(fast->pop(std::chrono::milliseconds(10)));
  }
  EXPECT_TRUE(slow->overflowed());
  EXPECT_FALSE(slow->pop(std::chrono::milliseconds(1)));
  EXPECT_FALSE(fast->closed());
  EXPECT_EQ(bus.subscribers(), 1u);
  EXPECT_EQ(bus.disconnected_for_overflow(), 1u);
}

TEST(EventBus, ShutdownDrainsThenCloses) {
  EventBus bus;
  auto s = bus.subscribe();
  bus.publish({1, true, 9, point(5)});
  bus.shutdown();
  const auto e = s->pop(std::chrono::milliseconds(10));
  ASSERT_TRUE(e);
  EXPECT_TRUE(e->replay);
  EXPECT_FALSE(s->pop(std::chrono::milliseconds(10)));
  EXPECT_TRUE(s->closed());
  EXPECT_TRUE(bus.subscribe()->closed());
}

TEST(EventBus, EventTextEmbedsLogRecord) {
  const auto text = format_event({7, true, 2, point(1234)});
  EXPECT_EQ(text, "{\"seq\":7,\"replay\":true,\"replay_id\":2,\"point\":" + storage::format_record(point(1234)) + "}");
}

CameraDef uhd_def(const std::string& id) {
  return CameraDef{.id = id,
                   .intrinsics = fiducial::CameraIntrinsics::from_fov(3840, 2160, 1.2217),
                   .pose = {},
                   .calibration_rms_px = std::nullopt,
                   .bits_per_width = 10,
                   .pixels_per_bit = 5};
}

TEST(Planning, MatchesFormulaAndIsLinearInTagSize) {
  const std::vector<CameraDef> cams{uhd_def("a"), uhd_def("b")};
  const std::vector<double> sizes{0.25, 0.5, 1.0};
  const auto rows = plan_cameras(cams, sizes);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[1].camera_id, "a");
  EXPECT_NEAR(*rows[1].max_distance_m, 31.43, 0.0005 * 31.43);
  EXPECT_EQ(*rows[2].max_distance_m, 2.0 * *rows[1].max_distance_m);
  EXPECT_EQ(*rows[1].max_distance_m, 2.0 * *rows[0].max_distance_m);
  EXPECT_EQ(rows[3].camera_id, "b");

  const auto records = format_plan_records(rows);
  EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 6);
  EXPECT_EQ(records.find("{\"camera\":\"a\",\"tag_size_m\":0.25,\"b\":10,\"p\":5.0,"), 0u) << records;
}

TEST(Planning, EmptyTagListAndDomainErrors) {
  const std::vector<CameraDef> cams{uhd_def("a")};
  EXPECT_TRUE(plan_cameras(cams, std::vector<double>{}).empty());
  const auto header_only = format_plan_table({});
  EXPECT_EQ(std::count(header_only.begin(), header_only.end(), '\n'), 1);
  auto coarse = uhd_def("coarse");
  coarse.pixels_per_bit = 1000;  // tan argument past pi/2
  const std::vector<CameraDef> bad{coarse};
  const auto rows = plan_cameras(bad, std::vector<double>{0.5, -1.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].max_distance_m);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_NE(format_plan_table(rows).find("error:"), std::string::npos);
  EXPECT_NE(format_plan_records(rows).find("\"max_distance_m\":null"), std::string::npos);
}

}  // namespace
}  // namespace flightline::service
