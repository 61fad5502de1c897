#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "flightline/fiducial/geometry.hpp"
#include "flightline/geodesy/geodesy.hpp"
#include "flightline/lorawan/network.hpp"
#include "flightline/storage/trajectory_log.hpp"
#include "flightline/tracker/track_point.hpp"

namespace flightline::tracking {

class BindingConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BindingFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which asset a LoRa device address or a fiducial tag id belongs to.
class BindingTable {
 public:
  /// Throws BindingConflict when the key is bound to a different asset and `force` is false.
  void bind_device(std::uint32_t dev_addr, const AssetId& asset, bool force = false);
  void bind_tag(int tag_id, const AssetId& asset, bool force = false);

  const AssetId* device(std::uint32_t dev_addr) const;
  const AssetId* tag(int tag_id) const;

  /// True when any key resolves to `asset`.
  bool knows(const AssetId& asset) const;

  std::size_t size() const noexcept { return devices_.size() + tags_.size(); }

  // Line grammar, '#' starts a comment:
  //   device <dev_addr: decimal or 0x hex> <kind> <id>
  //   tag <tag_id> <kind> <id>
  static BindingTable parse(std::istream& in);
  static BindingTable load(const std::string& path);

 private:
  std::map<std::uint32_t, AssetId> devices_;
  std::map<int, AssetId> tags_;
};

struct Committed {
  TrackPoint point;
  std::uint64_t seq;
};
struct Unbound {};
struct Stale {};
struct Skipped {
  std::string reason;
};

using IngestOutcome = std::variant<Committed, Unbound, Stale, Skipped>;

class UncalibratedCamera : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrackerMetrics {
  std::uint64_t committed = 0;
  std::uint64_t gps_committed = 0;
  std::uint64_t sightings = 0;
  std::uint64_t sightings_committed = 0;
  std::uint64_t unbound = 0;
  std::uint64_t stale = 0;
  std::uint64_t skipped = 0;
};

/// Registry of the latest state of every tracked asset.
///
/// All ingest calls are serialized; each commit is appended to the trajectory log
/// (when one is attached) before it becomes visible, and a failed append aborts
/// the commit. Points are committed in their log-canonical form, so a replay of
/// the log reproduces them exactly. snapshot() may run concurrently with ingest
/// and always sees a prefix of the commit order.
class Tracker {
 public:
  using CommitObserver = std::function<void(const TrackPoint&, std::uint64_t seq)>;

  Tracker(geo::FrameOrigin origin, BindingTable bindings, storage::TrajectoryWriter* log = nullptr);

  const geo::FrameOrigin& origin() const noexcept { return origin_; }

  void bind_device(std::uint32_t dev_addr, const AssetId& asset, bool force = false);
  void bind_tag(int tag_id, const AssetId& asset, bool force = false);
  bool knows(const AssetId& asset) const;

  /// Registers (or replaces) a calibrated camera. `camera_pose` is in the ENU frame.
  void add_camera(const std::string& camera_id, const fiducial::CameraIntrinsics& intrinsics,
                  const fiducial::Pose& camera_pose);

  /// Observers run on the commit path, in commit order. They must not call back into ingest.
  void add_observer(CommitObserver observer);

  IngestOutcome ingest_gps(const lora::NewFix& fix);

  /// Throws UncalibratedCamera for an unknown camera id.
  IngestOutcome ingest_sighting(const fiducial::TagDetection& detection, const std::string& camera_id,
                                std::int64_t timestamp_ms);

  /// Re-commits a point read back from a trajectory log.
  IngestOutcome ingest_point(const TrackPoint& point);

  /// Latest committed point per asset, ordered by asset id.
  std::vector<TrackPoint> snapshot() const;

  TrackerMetrics metrics() const;

 private:
  struct Camera {
    fiducial::CameraIntrinsics intrinsics;
    fiducial::Pose pose;
  };

  IngestOutcome commit_locked(TrackPoint point);

  geo::FrameOrigin origin_;
  storage::TrajectoryWriter* log_;

  mutable std::mutex commit_mutex_;  // serializes every ingest
  BindingTable bindings_;
  std::unordered_map<std::string, Camera> cameras_;
  std::vector<CommitObserver> observers_;
  std::uint64_t next_seq_ = 1;

  mutable std::shared_mutex state_mutex_;  // guards latest_ and metrics_
  std::map<AssetId, TrackPoint> latest_;
  TrackerMetrics metrics_;
};

}  // namespace flightline::tracking
