#pragma once

#include <cstdint>
#include <stop_token>
#include <string>
#include <vector>

#include "flightline/service/config.hpp"
#include "flightline/service/pipeline.hpp"
#include "flightline/service/scenario.hpp"

namespace flightline::service {

struct SimOptions {
  double speed = 1.0;  // simulated seconds per wall second; 0 runs unpaced
  std::stop_token stop;
};

struct SimSummary {
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_deferred = 0;  // held back by the duty-cycle budget
  std::uint64_t frames_heard = 0;     // reached at least one gateway
  std::uint64_t copies_sent = 0;      // one per frame per gateway
  std::uint64_t forwarded = 0;
  std::uint64_t dropped_out_of_range = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t new_fixes = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t decode_failures = 0;
  std::uint64_t gps_committed = 0;
  std::uint64_t unbound = 0;
  std::uint64_t stale = 0;
  std::uint64_t sightings_generated = 0;
  std::uint64_t sightings_committed = 0;
  std::uint64_t sightings_skipped = 0;
  std::uint64_t sightings_unbound = 0;
  std::uint64_t sightings_stale = 0;
  bool cancelled = false;

  std::uint64_t dropped() const noexcept { return dropped_out_of_range + dropped_loss; }

  /// Broken counter identities, empty when the run is consistent.
  std::vector<std::string> violations() const;
};

std::string format_summary(const SimSummary& s);

/// Runs the scenario's devices, gateways and synthetic cameras against `pipeline`
/// in simulated time. Timestamps come from the scenario clock, so a run is fully
/// determined by the scenario and its seeds; `speed` only paces wall time.
///
/// Scenario assets are bound in the pipeline's tracker first (throws
/// tracking::BindingConflict on a clash). Synthetic cameras render with the pose
/// of the matching camera definition, which must also be registered in the tracker.
SimSummary run_simulation(const Scenario& scenario, const std::vector<CameraDef>& cameras, Pipeline& pipeline,
                          const SimOptions& options = {});

}  // namespace flightline::service
