// Copyright 2026 The mvpose Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Asynchronous fusion: camera producers push their latest 2D skeleton into a
// ViewBuffer at their own rate; a single consumer ticks at a fixed rate and
// triangulates whatever fresh views are buffered.
//
// Threading contract: any number of threads may call ViewBuffer::ingest
// concurrently (typically one per camera). Exactly one thread drives
// FusionLoop::tick. Slots are replaced atomically under a per-camera lock
// held only for a pointer swap, so tick never waits on a producer's work.

#ifndef MVPOSE_FUSION_H_
#define MVPOSE_FUSION_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "mvpose/geometry.h"
#include "mvpose/pipeline.h"
#include "mvpose/skeleton.h"
#include "mvpose/weights.h"

namespace mvpose {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;  // seconds
};

class SteadyClock : public Clock {
 public:
  double now() const override {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  }
};

// Deterministic clock for tests and replays. Each read advances the time by
// `step_per_read`, which models processing cost between two reads.
// Not thread-safe.
class VirtualClock : public Clock {
 public:
  explicit VirtualClock(double start = 0.0, double step_per_read = 0.0)
      : time_(start), step_(step_per_read) {}
  double now() const override {
    const double t = time_;
    time_ += step_;
    return t;
  }
  void set(double t) { time_ = t; }
  void advance(double dt) { time_ += dt; }

 private:
  mutable double time_;
  double step_;
};

enum class EmitPolicy {
  kEveryTick,  // emit on every tick with >= 2 fresh views
  kOnChange,   // emit only when a slot changed since the last emission
};

struct FusionConfig {
  double tick_rate = 100.0;         // Hz
  double staleness_horizon = 0.5;   // seconds
  EmitPolicy emit_policy = EmitPolicy::kEveryTick;
  WeightParams weight_params;

  void validate() const;  // throws InvariantViolation
};

struct LatencyRecord {
  CameraId camera = 0;
  double capture_to_ingest = 0.0;  // seconds
  double ingest_to_output = 0.0;   // seconds
};

class ViewBuffer {
 public:
  struct Entry {
    Skeleton2D view;
    double arrival = 0.0;
    std::uint64_t sequence = 0;  // global ingest order
  };
  using EntryPtr = std::shared_ptr<const Entry>;

  explicit ViewBuffer(const std::vector<CameraId>& cameras);
  ViewBuffer(const ViewBuffer&) = delete;
  ViewBuffer& operator=(const ViewBuffer&) = delete;

  // Stores the view if it is newer than the camera's current one. Older or
  // equal timestamps are dropped and counted as reorder events; unknown
  // cameras are dropped and counted separately. Thread-safe.
  bool ingest(Skeleton2D view, double arrival_time);

  // Current entry per camera (null for empty slots), in camera id order.
  std::vector<std::pair<CameraId, EntryPtr>> snapshot() const;

  // Empties the slot if it still holds `expected`.
  void evict(CameraId camera, const EntryPtr& expected);

  std::uint64_t reorder_count() const { return reorders_.load(std::memory_order_relaxed); }
  std::uint64_t unknown_camera_count() const {
    return unknown_.load(std::memory_order_relaxed);
  }
  std::size_t size() const;  // occupied slots

 private:
  struct Slot {
    CameraId id;
    mutable std::mutex mu;
    EntryPtr entry;
  };
  Slot* find_slot(CameraId id) const;

  std::vector<std::unique_ptr<Slot>> slots_;  // sorted by id, fixed after construction
  std::atomic<std::uint64_t> next_sequence_{1};
  std::atomic<std::uint64_t> reorders_{0};
  std::atomic<std::uint64_t> unknown_{0};
};

struct FusionOutput {
  Skeleton3D skeleton;                  // timestamp = tick time
  std::vector<LatencyRecord> latency;   // one per view first used by this output
  std::vector<CameraId> cameras;        // views that were fresh at this tick
  double oldest_view_age = 0.0;         // now - oldest capture timestamp used
  double tick_cost = 0.0;               // seconds, measured with the loop clock
};

class FusionLoop {
 public:
  // `rig` and `buffer` must outlive the loop.
  FusionLoop(const Rig& rig, FusionConfig cfg, ViewBuffer& buffer, const Clock& clock);

  // One consumer step at time `now`: evicts views captured before
  // now - staleness_horizon, then triangulates the remaining ones when at
  // least two are left. Returns nothing when no output is due; absence of
  // output is a normal state. Output timestamps strictly increase.
  std::optional<FusionOutput> tick(double now);

  const FusionConfig& config() const { return cfg_; }
  const Skeleton3D* prior() const { return last_ ? &*last_ : nullptr; }
  std::uint64_t emissions() const { return emissions_; }

 private:
  const Rig& rig_;
  FusionConfig cfg_;
  ViewBuffer& buffer_;
  const Clock& clock_;
  std::map<CameraId, std::uint64_t> used_sequence_;  // last sequence emitted per camera
  std::optional<Skeleton3D> last_;
  std::vector<CameraId> last_cameras_;
  std::optional<double> last_output_time_;
  std::uint64_t emissions_ = 0;
};

// Deterministic replay of recorded streams under a virtual clock. Each view
// arrives `ingest_delay(camera)` seconds after its capture timestamp; the
// loop ticks at cfg.tick_rate from `start` until `end`. Each tick is charged
// `tick_cost` seconds of virtual processing time.
struct ReplayResult {
  std::vector<FusionOutput> outputs;
  std::vector<double> tick_times;
  std::uint64_t reorders = 0;
};
ReplayResult replay_virtual(const ViewStreams& streams, const Rig& rig, const FusionConfig& cfg,
                            double start, double end,
                            const std::function<double(CameraId)>& ingest_delay,
                            double tick_cost = 0.0);

// Drives `loop` at its configured rate on the wall clock until `stop` is set
// or `inputs_done()` returns true (one last tick is then taken). Each output
// is passed to `sink` on the calling thread.
void run_fixed_rate(FusionLoop& loop, const Clock& clock, const std::atomic<bool>& stop,
                    const std::function<bool()>& inputs_done,
                    const std::function<void(const FusionOutput&)>& sink);

}  // namespace mvpose

#endif  // MVPOSE_FUSION_H_
