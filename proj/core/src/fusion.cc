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

#include "mvpose/fusion.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mvpose/error.h"
#include "mvpose/triangulator.h"

namespace mvpose {

void FusionConfig::validate() const {
  if (!(tick_rate > 0.0) || !std::isfinite(tick_rate)) {
    throw InvariantViolation("fusion config: tick_rate must be positive");
  }
  if (!(staleness_horizon > 0.0)) {
    throw InvariantViolation("fusion config: staleness_horizon must be positive");
  }
  weight_params.validate();
}

ViewBuffer::ViewBuffer(const std::vector<CameraId>& cameras) {
  std::vector<CameraId> ids = cameras;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  slots_.reserve(ids.size());
  for (CameraId id : ids) {
    auto slot = std::make_unique<Slot>();
    slot->id = id;
    slots_.push_back(std::move(slot));
  }
}

ViewBuffer::Slot* ViewBuffer::find_slot(CameraId id) const {
  auto it = std::lower_bound(slots_.begin(), slots_.end(), id,
                             [](const std::unique_ptr<Slot>& s, CameraId v) { return s->id < v; });
  if (it == slots_.end() || (*it)->id != id) return nullptr;
  return it->get();
}

bool ViewBuffer::ingest(Skeleton2D view, double arrival_time) {
  Slot* slot = find_slot(view.camera);
  if (!slot) {
    unknown_.fetch_add(1, std::memory_order_relaxed);
    return false;
  }
  auto fresh = std::make_shared<Entry>();
  fresh->view = std::move(view);
  fresh->arrival = arrival_time;

  EntryPtr displaced;
  {
    std::lock_guard<std::mutex> lock(slot->mu);
    if (slot->entry && !(fresh->view.timestamp > slot->entry->view.timestamp)) {
      reorders_.fetch_add(1, std::memory_order_relaxed);
      return false;
    }
    fresh->sequence = next_sequence_.fetch_add(1, std::memory_order_relaxed);
    displaced = std::move(slot->entry);
    slot->entry = std::move(fresh);
  }
  return true;
}

std::vector<std::pair<CameraId, ViewBuffer::EntryPtr>> ViewBuffer::snapshot() const {
  std::vector<std::pair<CameraId, EntryPtr>> out;
  out.reserve(slots_.size());
  for (const auto& slot : slots_) {
    std::lock_guard<std::mutex> lock(slot->mu);
    out.emplace_back(slot->id, slot->entry);
  }
  return out;
}

void ViewBuffer::evict(CameraId camera, const EntryPtr& expected) {
  Slot* slot = find_slot(camera);
  if (!slot) return;
  EntryPtr displaced;
  std::lock_guard<std::mutex> lock(slot->mu);
  if (slot->entry == expected) displaced = std::move(slot->entry);
}

std::size_t ViewBuffer::size() const {
  std::size_t n = 0;
  for (const auto& slot : slots_) {
    std::lock_guard<std::mutex> lock(slot->mu);
    n += slot->entry != nullptr;
  }
  return n;
}

FusionLoop::FusionLoop(const Rig& rig, FusionConfig cfg, ViewBuffer& buffer, const Clock& clock)
    : rig_(rig), cfg_(std::move(cfg)), buffer_(buffer), clock_(clock) {
  cfg_.validate();
}

std::optional<FusionOutput> FusionLoop::tick(double now) {
  const double started = clock_.now();
  if (last_output_time_ && !(now > *last_output_time_)) return std::nullopt;

  const double oldest_allowed = now - cfg_.staleness_horizon;
  std::vector<ViewBuffer::EntryPtr> fresh;
  for (auto& [id, entry] : buffer_.snapshot()) {
    if (!entry) continue;
    if (entry->view.timestamp < oldest_allowed) {
      buffer_.evict(id, entry);
      continue;
    }
    fresh.push_back(std::move(entry));
  }
  if (fresh.size() < 2) return std::nullopt;

  std::vector<CameraId> cameras;
  bool changed = false;
  for (const auto& e : fresh) {
    cameras.push_back(e->view.camera);
    auto it = used_sequence_.find(e->view.camera);
    if (it == used_sequence_.end() || it->second != e->sequence) changed = true;
  }
  if (!changed && cfg_.emit_policy == EmitPolicy::kOnChange) return std::nullopt;

  FusionOutput out;
  if (!changed && last_ && cameras == last_cameras_) {
    out.skeleton = *last_;
  } else {
    ViewSet views;
    for (const auto& e : fresh) views.emplace(e->view.camera, e->view);
    try {
      out.skeleton = triangulate_skeleton(views, rig_, cfg_.weight_params, prior());
    } catch (const InsufficientCameras&) {
      return std::nullopt;
    }
  }
  out.skeleton.timestamp = now;
  out.cameras = cameras;

  const double finished = now + std::max(0.0, clock_.now() - started);
  out.tick_cost = finished - now;
  double oldest_capture = now;
  for (const auto& e : fresh) {
    oldest_capture = std::min(oldest_capture, e->view.timestamp);
    auto it = used_sequence_.find(e->view.camera);
    if (it != used_sequence_.end() && it->second == e->sequence) continue;
    out.latency.push_back(LatencyRecord{e->view.camera,
                                        std::max(0.0, e->arrival - e->view.timestamp),
                                        std::max(0.0, finished - e->arrival)});
    used_sequence_[e->view.camera] = e->sequence;
  }
  out.oldest_view_age = now - oldest_capture;

  last_ = out.skeleton;
  last_cameras_ = std::move(cameras);
  last_output_time_ = now;
  ++emissions_;
  return out;
}

ReplayResult replay_virtual(const ViewStreams& streams, const Rig& rig, const FusionConfig& cfg,
                            double start, double end,
                            const std::function<double(CameraId)>& ingest_delay,
                            double tick_cost) {
  struct Arrival {
    double t;
    CameraId camera;
    const Skeleton2D* view;
  };
  std::vector<Arrival> arrivals;
  for (const auto& [id, stream] : streams) {
    const double delay = ingest_delay ? ingest_delay(id) : 0.0;
    for (const Skeleton2D& v : stream) arrivals.push_back(Arrival{v.timestamp + delay, id, &v});
  }
  std::stable_sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.t < b.t || (a.t == b.t && a.camera < b.camera);
  });

  std::vector<CameraId> ids;
  for (const auto& [id, cam] : rig) ids.push_back(id);
  ViewBuffer buffer(ids);
  // tick() reads the clock twice, so each read advances by the full cost.
  VirtualClock clock(start, tick_cost);
  FusionLoop loop(rig, cfg, buffer, clock);

  ReplayResult result;
  const double period = 1.0 / cfg.tick_rate;
  std::size_t next = 0;
  for (std::int64_t k = 0;; ++k) {
    const double now = start + static_cast<double>(k) * period;
    if (now > end + 1e-12) break;
    for (; next < arrivals.size() && arrivals[next].t <= now; ++next) {
      buffer.ingest(*arrivals[next].view, arrivals[next].t);
    }
    clock.set(now);
    result.tick_times.push_back(now);
    if (auto out = loop.tick(now)) result.outputs.push_back(std::move(*out));
  }
  result.reorders = buffer.reorder_count();
  return result;
}

void run_fixed_rate(FusionLoop& loop, const Clock& clock, const std::atomic<bool>& stop,
                    const std::function<bool()>& inputs_done,
                    const std::function<void(const FusionOutput&)>& sink) {
  using namespace std::chrono;
  const double period = 1.0 / loop.config().tick_rate;
  const auto wall_start = steady_clock::now();
  const double clock_start = clock.now();
  for (std::int64_t k = 0; !stop.load(std::memory_order_relaxed); ++k) {
    const bool last = inputs_done && inputs_done();
    const auto wake = wall_start + duration_cast<steady_clock::duration>(
                                       duration<double>(static_cast<double>(k) * period));
    std::this_thread::sleep_until(wake);
    const double now = clock_start + static_cast<double>(k) * period;
    if (auto out = loop.tick(std::max(now, clock.now()))) sink(*out);
    if (last) break;
  }
}

}  // namespace mvpose
