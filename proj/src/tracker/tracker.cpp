#include "flightline/tracker/tracker.hpp"

#include <fstream>
#include <sstream>

#include "flightline/fiducial/tag_pose.hpp"
#include "flightline/lorawan/gps_payload.hpp"

namespace flightline::tracking {

namespace {

template <typename Key>
void bind_into(std::map<Key, AssetId>& table, Key key, const AssetId& asset, bool force, const char* what) {
  if (!is_valid_asset_id(asset.id)) throw BindingConflict("invalid asset id '" + asset.id + "'");
  auto [it, inserted] = table.try_emplace(key, asset);
  if (inserted || it->second == asset) return;
  if (!force) {
    throw BindingConflict(std::string(what) + " " + std::to_string(key) + " is already bound to " +
                          it->second.id);
  }
  it->second = asset;
}

}  // namespace

void BindingTable::bind_device(std::uint32_t dev_addr, const AssetId& asset, bool force) {
  bind_into(devices_, dev_addr, asset, force, "device");
}

void BindingTable::bind_tag(int tag_id, const AssetId& asset, bool force) {
  bind_into(tags_, tag_id, asset, force, "tag");
}

const AssetId* BindingTable::device(std::uint32_t dev_addr) const {
  auto it = devices_.find(dev_addr);
  return it == devices_.end() ? nullptr : &it->second;
}

const AssetId* BindingTable::tag(int tag_id) const {
  auto it = tags_.find(tag_id);
  return it == tags_.end() ? nullptr : &it->second;
}

bool BindingTable::knows(const AssetId& asset) const {
  for (const auto& [_, a] : devices_) {
    if (a == asset) return true;
  }
  for (const auto& [_, a] : tags_) {
    if (a == asset) return true;
  }
  return false;
}

BindingTable BindingTable::parse(std::istream& in) {
  BindingTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string type, key, kind, id, extra;
    if (!(fields >> type)) continue;
    const auto fail = [&](const std::string& why) {
      throw BindingFileError("bindings line " + std::to_string(lineno) + ": " + why);
    };
    if (!(fields >> key >> kind >> id) || (fields >> extra)) fail("expected '<device|tag> <key> <kind> <id>'");
    auto asset_kind = parse_asset_kind(kind);
    if (!asset_kind) fail("unknown asset kind '" + kind + "'");
    if (!is_valid_asset_id(id)) fail("invalid asset id '" + id + "'");
    const AssetId asset{*asset_kind, id};
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(key, &used, 0);
    } catch (const std::exception&) {
      fail("bad key '" + key + "'");
    }
    if (used != key.size()) fail("bad key '" + key + "'");
    try {
      if (type == "device") {
        if (value > 0xFFFFFFFFULL) fail("dev_addr does not fit in 32 bits");
        table.bind_device(static_cast<std::uint32_t>(value), asset);
      } else if (type == "tag") {
        if (value > 0x7FFFFFFFULL) fail("tag id too large");
        table.bind_tag(static_cast<int>(value), asset);
      } else {
        fail("unknown binding type '" + type + "'");
      }
    } catch (const BindingConflict& e) {
      fail(e.what());
    }
  }
  return table;
}

BindingTable BindingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BindingFileError("cannot open bindings file " + path);
  return parse(in);
}

Tracker::Tracker(geo::FrameOrigin origin, BindingTable bindings, storage::TrajectoryWriter* log)
    : origin_(origin), log_(log), bindings_(std::move(bindings)) {}

void Tracker::bind_device(std::uint32_t dev_addr, const AssetId& asset, bool force) {
  std::lock_guard lock(commit_mutex_);
  bindings_.bind_device(dev_addr, asset, force);
}

void Tracker::bind_tag(int tag_id, const AssetId& asset, bool force) {
  std::lock_guard lock(commit_mutex_);
  bindings_.bind_tag(tag_id, asset, force);
}

bool Tracker::knows(const AssetId& asset) const {
  {
    std::shared_lock lock(state_mutex_);
    if (latest_.contains(asset)) return true;
  }
  std::lock_guard lock(commit_mutex_);
  return bindings_.knows(asset);
}

void Tracker::add_camera(const std::string& camera_id, const fiducial::CameraIntrinsics& intrinsics,
                         const fiducial::Pose& camera_pose) {
  fiducial::validate(camera_pose, 1e-6);
  std::lock_guard lock(commit_mutex_);
  cameras_.insert_or_assign(camera_id, Camera{intrinsics, camera_pose});
}

void Tracker::add_observer(CommitObserver observer) {
  std::lock_guard lock(commit_mutex_);
  observers_.push_back(std::move(observer));
}

IngestOutcome Tracker::ingest_gps(const lora::NewFix& fix) {
  std::lock_guard lock(commit_mutex_);
  const AssetId* asset = bindings_.device(fix.dev_addr);
  if (asset == nullptr) {
    std::unique_lock state(state_mutex_);
    ++metrics_.unbound;
    return Unbound{};
  }
  TrackPoint p;
  p.asset = *asset;
  p.position = lora::to_geo_point(fix.fix);
  p.source = Source::kGpsLora;
  p.timestamp_ms = fix.rx_unix_ms;
  p.quality = static_cast<double>(fix.fix.battery_pct);
  return commit_locked(std::move(p));
}

IngestOutcome Tracker::ingest_sighting(const fiducial::TagDetection& detection, const std::string& camera_id,
                                       std::int64_t timestamp_ms) {
  std::lock_guard lock(commit_mutex_);
  auto cam = cameras_.find(camera_id);
  if (cam == cameras_.end()) throw UncalibratedCamera("camera '" + camera_id + "' has no calibration");
  {
    std::unique_lock state(state_mutex_);
    ++metrics_.sightings;
  }
  const AssetId* asset = bindings_.tag(detection.tag_id);
  if (asset == nullptr) {
    std::unique_lock state(state_mutex_);
    ++metrics_.unbound;
    return Unbound{};
  }
  TrackPoint p;
  try {
    const auto est = fiducial::estimate_tag_pose(detection, cam->second.intrinsics);
    const auto enu = fiducial::tag_world_position(cam->second.pose, est.tag_in_camera);
    p.position = geo::enu_to_geo(enu, origin_);
    p.quality = est.reprojection_rms_px;
  } catch (const std::exception& e) {
    std::unique_lock state(state_mutex_);
    ++metrics_.skipped;
    return Skipped{e.what()};
  }
  p.asset = *asset;
  p.source = Source::kFiducial;
  p.timestamp_ms = timestamp_ms;
  return commit_locked(std::move(p));
}

IngestOutcome Tracker::ingest_point(const TrackPoint& point) {
  std::lock_guard lock(commit_mutex_);
  return commit_locked(point);
}

IngestOutcome Tracker::commit_locked(TrackPoint point) {
  point = storage::canonical(point);
  {
    std::shared_lock state(state_mutex_);
    if (auto it = latest_.find(point.asset); it != latest_.end()) {
      const auto last = it->second.timestamp_ms;
      // Several cameras may see one tag in the same frame; the first sighting wins.
      const bool stale = point.source == Source::kFiducial ? point.timestamp_ms <= last : point.timestamp_ms < last;
      if (stale) {
        state.unlock();
        std::unique_lock w(state_mutex_);
        ++metrics_.stale;
        return Stale{};
      }
    }
  }
  if (log_ != nullptr) log_->append(point);  // throws: nothing committed
  const std::uint64_t seq = next_seq_++;
  {
    std::unique_lock state(state_mutex_);
    latest_.insert_or_assign(point.asset, point);
    ++metrics_.committed;
    if (point.source == Source::kGpsLora) {
      ++metrics_.gps_committed;
    } else {
      ++metrics_.sightings_committed;
    }
  }
  for (const auto& observer : observers_) observer(point, seq);
  return Committed{std::move(point), seq};
}

std::vector<TrackPoint> Tracker::snapshot() const {
  std::shared_lock state(state_mutex_);
  std::vector<TrackPoint> out;
  out.reserve(latest_.size());
  for (const auto& [_, p] : latest_) out.push_back(p);
  return out;
}

TrackerMetrics Tracker::metrics() const {
  std::shared_lock state(state_mutex_);
  return metrics_;
}

}  // namespace flightline::tracking
