#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <vector>

#include "flightline/storage/record.hpp"

namespace flightline::storage {

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only writer. Opening an existing log drops a trailing partial line
/// left by a crash, so new records always start on a record boundary.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::filesystem::path path);
  ~TrajectoryWriter();

  TrajectoryWriter(const TrajectoryWriter&) = delete;
  TrajectoryWriter& operator=(const TrajectoryWriter&) = delete;

  /// Writes one line and flushes it. Throws StorageError on failure.
  void append(const tracking::TrackPoint& point);
  void close();

  const std::filesystem::path& path() const noexcept { return path_; }
  std::uint64_t records_written() const noexcept { return written_; }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::atomic<std::uint64_t> written_{0};
  std::mutex mutex_;
};

struct LogContents {
  std::vector<tracking::TrackPoint> records;
  std::size_t malformed_lines = 0;
  bool partial_tail = false;  // unterminated last line, ignored
};

/// Reads every complete record line. Safe to call while a writer appends.
LogContents read_log(const std::filesystem::path& path);

/// Records with timestamp in [from_ms, to_ms], optionally for one asset, in commit order.
/// Throws std::invalid_argument when from_ms > to_ms.
std::vector<tracking::TrackPoint> query(std::span<const tracking::TrackPoint> records,
                                        const std::optional<tracking::AssetId>& asset,
                                        std::int64_t from_ms, std::int64_t to_ms);

struct QueryResult {
  std::vector<tracking::TrackPoint> records;
  std::size_t malformed_lines = 0;
};

QueryResult query(const std::filesystem::path& path, const std::optional<tracking::AssetId>& asset,
                  std::int64_t from_ms, std::int64_t to_ms);

/// Replay window and speed. rate == infinity replays as fast as possible.
struct ReplayClock {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  double rate = 1.0;

  static constexpr double kBatch = std::numeric_limits<double>::infinity();
};

void validate(const ReplayClock& clock);

struct ReplaySummary {
  std::size_t emitted = 0;
  bool cancelled = false;
};

using ReplaySink = std::function<void(const tracking::TrackPoint&)>;

/// Emits every record in the clock window at (ts - start)/rate after the call,
/// in the order given. Stops early when `stop` is requested.
ReplaySummary replay(std::span<const tracking::TrackPoint> records, const ReplayClock& clock,
                     const ReplaySink& sink, std::stop_token stop = {});

ReplaySummary replay(const std::filesystem::path& log, const ReplayClock& clock, const ReplaySink& sink,
                     std::stop_token stop = {});

}  // namespace flightline::storage
