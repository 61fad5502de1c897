#include "flightline/storage/trajectory_log.hpp"

#include <cerrno>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>

namespace flightline::storage {

using tracking::TrackPoint;

namespace {

// Cuts an unterminated final line so appends resume on a record boundary.
void trim_partial_tail(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::uintmax_t keep = size;
  char c = 0;
  while (keep > 0) {
    in.seekg(static_cast<std::streamoff>(keep - 1));
    in.get(c);
    if (c == '\n') break;
    --keep;
  }
  in.close();
  if (keep != size) std::filesystem::resize_file(path, keep);
}

}  // namespace

TrajectoryWriter::TrajectoryWriter(std::filesystem::path path) : path_(std::move(path)) {
  try {
    trim_partial_tail(path_);
  } catch (const std::filesystem::filesystem_error& e) {
    throw StorageError(std::string("cannot repair log tail: ") + e.what());
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (file_ == nullptr) {
    throw StorageError("cannot open log " + path_.string() + ": " + std::strerror(errno));
  }
}

TrajectoryWriter::~TrajectoryWriter() { close(); }

void TrajectoryWriter::append(const TrackPoint& point) {
  std::string line = format_record(point);
  line += '\n';
  std::lock_guard lock(mutex_);
  if (file_ == nullptr) throw StorageError("log is closed");
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
    throw StorageError("write to " + path_.string() + " failed: " + std::strerror(errno));
  }
  ++written_;
}

void TrajectoryWriter::close() {
  std::lock_guard lock(mutex_);
  if (file_ != nullptr) {
    std::fclose(file_);
    file_ = nullptr;
  }
}

LogContents read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open log " + path.string());
  LogContents out;
  std::string line;
  while (std::getline(in, line)) {
    if (in.eof()) {
      // getline hit EOF without a newline: a record still being written or cut short.
      if (!line.empty()) out.partial_tail = true;
      break;
    }
    if (line.empty()) continue;
    try {
      out.records.push_back(parse_record(line));
    } catch (const RecordError&) {
      ++out.malformed_lines;
    }
  }
  return out;
}

std::vector<TrackPoint> query(std::span<const TrackPoint> records, const std::optional<tracking::AssetId>& asset,
                              std::int64_t from_ms, std::int64_t to_ms) {
  if (from_ms > to_ms) throw std::invalid_argument("query range has from > to");
  std::vector<TrackPoint> out;
  for (const auto& r : records) {
    if (r.timestamp_ms < from_ms || r.timestamp_ms > to_ms) continue;
    if (asset && r.asset != *asset) continue;
    out.push_back(r);
  }
  return out;
}

QueryResult query(const std::filesystem::path& path, const std::optional<tracking::AssetId>& asset,
                  std::int64_t from_ms, std::int64_t to_ms) {
  if (from_ms > to_ms) throw std::invalid_argument("query range has from > to");
  auto contents = read_log(path);
  return QueryResult{query(contents.records, asset, from_ms, to_ms), contents.malformed_lines};
}

void validate(const ReplayClock& clock) {
  if (clock.start_ms > clock.end_ms) throw std::invalid_argument("replay start after end");
  if (!(clock.rate > 0.0)) throw std::invalid_argument("replay rate must be positive");
}

ReplaySummary replay(std::span<const TrackPoint> records, const ReplayClock& clock, const ReplaySink& sink,
                     std::stop_token stop) {
  validate(clock);
  using Clock = std::chrono::steady_clock;
  const auto began = Clock::now();
  const bool batch = std::isinf(clock.rate);
  std::mutex m;
  std::condition_variable_any cv;

  ReplaySummary summary;
  for (const auto& r : records) {
    if (r.timestamp_ms < clock.start_ms || r.timestamp_ms > clock.end_ms) continue;
    if (stop.stop_requested()) {
      summary.cancelled = true;
      return summary;
    }
    if (!batch) {
      const double offset_ms = static_cast<double>(r.timestamp_ms - clock.start_ms) / clock.rate;
      const auto due = began + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double, std::milli>(offset_ms));
      std::unique_lock lock(m);
      if (cv.wait_until(lock, stop, due, [] { return false; }) || stop.stop_requested()) {
        summary.cancelled = true;
        return summary;
      }
    }
    sink(r);
    ++summary.emitted;
  }
  return summary;
}

ReplaySummary replay(const std::filesystem::path& log, const ReplayClock& clock, const ReplaySink& sink,
                     std::stop_token stop) {
  validate(clock);
  const auto result = query(log, std::nullopt, clock.start_ms, clock.end_ms);
  return replay(result.records, clock, sink, std::move(stop));
}

}  // namespace flightline::storage
