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

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include "mvpose/error.h"
#include "mvpose/simulator.h"

namespace mvpose {
namespace {

Rig ring(int n) {
  Rig rig;
  for (const Camera& c : place_cameras_on_circle(n, 4.5, 1.0, Vec3(0, 0, 1))) {
    rig.emplace(c.id(), c);
  }
  return rig;
}

std::vector<CameraId> ids(const Rig& rig) {
  std::vector<CameraId> out;
  for (const auto& [id, c] : rig) out.push_back(id);
  return out;
}

const JointPositions& pose() {
  static const JointPositions p = t_pose(Anthropometry{}, Vec2(0, 0), 0.3);
  return p;
}

Skeleton2D view_of(const Camera& cam, double t) {
  Skeleton2D v;
  v.camera = cam.id();
  v.timestamp = t;
  for (JointId j : kAllJoints) {
    const Vec2 px = project(cam.projection(), pose()[index_of(j)]).pixel;
    v.joints.set(j, Detection2D{px.x(), px.y(), 0.9});
  }
  return v;
}

Skeleton2D bare_view(CameraId cam, double t) {
  Skeleton2D v;
  v.camera = cam;
  v.timestamp = t;
  return v;
}

TEST(ViewBuffer, IngestExamples) {
  ViewBuffer buf({0, 1});
  EXPECT_EQ(buf.size(), 0u);
  EXPECT_TRUE(buf.ingest(bare_view(0, 1.0), 1.0));
  EXPECT_EQ(buf.size(), 1u);
  EXPECT_DOUBLE_EQ(buf.snapshot()[0].second->view.timestamp, 1.0);

  EXPECT_TRUE(buf.ingest(bare_view(0, 2.0), 2.0));
  EXPECT_FALSE(buf.ingest(bare_view(0, 1.5), 2.1));
  EXPECT_FALSE(buf.ingest(bare_view(0, 2.0), 2.1));
  EXPECT_EQ(buf.reorder_count(), 2u);
  EXPECT_DOUBLE_EQ(buf.snapshot()[0].second->view.timestamp, 2.0);

  EXPECT_FALSE(buf.ingest(bare_view(7, 3.0), 3.0));
  EXPECT_EQ(buf.unknown_camera_count(), 1u);
}

TEST(ViewBuffer, InterleavedCamerasKeepOwnLatest) {
  ViewBuffer buf({0, 1});
  for (int k = 0; k < 10; ++k) {
    buf.ingest(bare_view(0, 0.1 * k), 0.1 * k);
    buf.ingest(bare_view(1, 0.1 * k + 0.05), 0.1 * k + 0.05);
  }
  const auto snap = buf.snapshot();
  ASSERT_EQ(snap.size(), 2u);
  EXPECT_DOUBLE_EQ(snap[0].second->view.timestamp, 0.9);
  EXPECT_DOUBLE_EQ(snap[1].second->view.timestamp, 0.95);
  EXPECT_EQ(buf.reorder_count(), 0u);
}

TEST(FusionConfig, Validate) {
  FusionConfig c;
  EXPECT_NO_THROW(c.validate());
  c.tick_rate = 0;
  EXPECT_THROW(c.validate(), InvariantViolation);
  c = FusionConfig{};
  c.staleness_horizon = -1;
  EXPECT_THROW(c.validate(), InvariantViolation);
}

TEST(FusionLoop, FourFreshViews) {
  const Rig rig = ring(4);
  ViewBuffer buf(ids(rig));
  VirtualClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  for (const auto& [id, cam] : rig) buf.ingest(view_of(cam, 1.0), 1.005);
  const auto out = loop.tick(1.01);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->skeleton.joints.size(), 14u);
  EXPECT_EQ(out->latency.size(), 4u);
  EXPECT_DOUBLE_EQ(out->skeleton.timestamp, 1.01);
  for (const LatencyRecord& r : out->latency) {
    EXPECT_NEAR(r.capture_to_ingest, 0.005, 1e-12);
    EXPECT_GE(r.ingest_to_output, 0.0);
  }
  EXPECT_LT((out->skeleton.joints.at(JointId::kNeck).position - pose()[0]).norm(), 1e-6);
}

TEST(FusionLoop, SingleFreshViewAfterPruning) {
  const Rig rig = ring(4);
  ViewBuffer buf(ids(rig));
  VirtualClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  buf.ingest(view_of(rig.at(0), 0.1), 0.1);
  buf.ingest(view_of(rig.at(1), 0.2), 0.2);
  buf.ingest(view_of(rig.at(2), 0.9), 0.9);
  EXPECT_FALSE(loop.tick(1.0));
  EXPECT_EQ(buf.size(), 1u);
}

TEST(FusionLoop, LatencyUnderOneMillisecond) {
  const Rig rig = ring(4);
  ViewBuffer buf(ids(rig));
  VirtualClock clock(0.0, 0.0004);
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  const double now = 2.0;
  for (const auto& [id, cam] : rig) buf.ingest(view_of(cam, now - 0.010), now);
  clock.set(now);
  const auto out = loop.tick(now);
  ASSERT_TRUE(out);
  EXPECT_NEAR(out->tick_cost, 0.0004, 1e-12);
  for (const LatencyRecord& r : out->latency) {
    EXPECT_LT(r.ingest_to_output, 0.001);
    EXPECT_NEAR(r.capture_to_ingest, 0.010, 1e-12);
  }
}

TEST(FusionLoop, TimestampsStrictlyIncrease) {
  const Rig rig = ring(3);
  ViewBuffer buf(ids(rig));
  VirtualClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  for (const auto& [id, cam] : rig) buf.ingest(view_of(cam, 1.0), 1.0);
  ASSERT_TRUE(loop.tick(1.0));
  EXPECT_FALSE(loop.tick(1.0));
  EXPECT_FALSE(loop.tick(0.99));
  const auto again = loop.tick(1.01);
  ASSERT_TRUE(again);
  EXPECT_GT(again->skeleton.timestamp, 1.0);
}

TEST(FusionLoop, EveryTickReusesCachedSkeleton) {
  const Rig rig = ring(3);
  ViewBuffer buf(ids(rig));
  VirtualClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  for (const auto& [id, cam] : rig) buf.ingest(view_of(cam, 1.0), 1.0);
  const auto a = loop.tick(1.0);
  const auto b = loop.tick(1.01);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->latency.size(), 3u);
  EXPECT_TRUE(b->latency.empty());
  EXPECT_TRUE(a->skeleton.joints == b->skeleton.joints);
}

TEST(FusionLoop, OnChangeEmitsOnlyAfterNewView) {
  const Rig rig = ring(3);
  ViewBuffer buf(ids(rig));
  VirtualClock clock;
  FusionConfig cfg;
  cfg.emit_policy = EmitPolicy::kOnChange;
  FusionLoop loop(rig, cfg, buf, clock);
  for (const auto& [id, cam] : rig) buf.ingest(view_of(cam, 1.0), 1.0);
  EXPECT_TRUE(loop.tick(1.0));
  EXPECT_FALSE(loop.tick(1.01));
  buf.ingest(view_of(rig.at(1), 1.02), 1.02);
  const auto out = loop.tick(1.03);
  ASSERT_TRUE(out);
  ASSERT_EQ(out->latency.size(), 1u);
  EXPECT_EQ(out->latency[0].camera, 1u);
}

TEST(FusionLoop, SilentCameraExcludedUntilResume) {
  const Rig rig = ring(4);
  ViewBuffer buf(ids(rig));
  VirtualClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  buf.ingest(view_of(rig.at(3), 0.003), 0.003);
  for (int k = 0; k < 300; ++k) {
    const double t = 0.01 * k;
    for (CameraId id : {0u, 1u, 2u}) buf.ingest(view_of(rig.at(id), t), t);
    const auto out = loop.tick(t);
    ASSERT_TRUE(out);
    const bool has3 = std::count(out->cameras.begin(), out->cameras.end(), 3u) > 0;
    EXPECT_EQ(has3, t < 0.503) << t;
    EXPECT_LE(out->oldest_view_age, 0.5 + 1e-12);
  }
  buf.ingest(view_of(rig.at(3), 3.0), 3.0);
  const auto out = loop.tick(3.0);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->cameras.size(), 4u);
}

TEST(FusionLoop, VirtualReplayRateAndFreshness) {
  const Rig rig = ring(4);
  ViewStreams streams;
  for (const auto& [id, cam] : rig) {
    const double offset = 0.007 * id;  // unsynchronized producers
    for (int k = 0; k < 300; ++k) streams[id].push_back(view_of(cam, offset + k / 30.0));
  }
  FusionConfig cfg;
  const ReplayResult r =
      replay_virtual(streams, rig, cfg, 0.0, 10.0, [](CameraId id) { return 0.002 + 0.001 * id; },
                     0.0004);
  ASSERT_GT(r.outputs.size(), 900u);
  const double span = r.outputs.back().skeleton.timestamp - r.outputs.front().skeleton.timestamp;
  const double rate = (r.outputs.size() - 1) / span;
  EXPECT_NEAR(rate, 100.0, 10.0);
  for (std::size_t i = 1; i < r.outputs.size(); ++i) {
    EXPECT_GT(r.outputs[i].skeleton.timestamp, r.outputs[i - 1].skeleton.timestamp);
  }
  for (const FusionOutput& o : r.outputs) EXPECT_LE(o.oldest_view_age, cfg.staleness_horizon);
  EXPECT_EQ(r.reorders, 0u);
}

// Producers hammer the buffer while one slow producer prepares large views;
// tick latency must stay bounded and per-camera timestamps must never regress.
TEST(FusionLoop, ConcurrentProducersStress) {
  const Rig rig = ring(5);
  ViewBuffer buf(ids(rig));
  SteadyClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> attempts{0};
  std::atomic<std::uint64_t> accepted{0};
  const double t0 = clock.now();

  std::vector<std::thread> producers;
  for (const auto& [id, cam] : rig) {
    producers.emplace_back([&, id = id, cam = &cam] {
      const bool slow = id == 4;
      while (!stop.load()) {
        Skeleton2D v = view_of(*cam, clock.now());
        if (slow) std::this_thread::sleep_for(std::chrono::milliseconds(30));
        attempts.fetch_add(1);
        if (buf.ingest(std::move(v), clock.now())) accepted.fetch_add(1);
        std::this_thread::sleep_for(std::chrono::microseconds(slow ? 0 : 200));
      }
    });
  }
  // A rogue producer replays old timestamps for camera 0.
  producers.emplace_back([&] {
    while (!stop.load()) {
      attempts.fetch_add(1);
      if (buf.ingest(bare_view(0, t0 - 1.0), clock.now())) accepted.fetch_add(1);
      std::this_thread::sleep_for(std::chrono::microseconds(300));
    }
  });

  std::vector<double> tick_ms;
  std::map<CameraId, double> last_seen;
  for (int k = 0; k < 300; ++k) {
    const auto a = std::chrono::steady_clock::now();
    const auto out = loop.tick(clock.now());
    const auto b = std::chrono::steady_clock::now();
    tick_ms.push_back(std::chrono::duration<double, std::milli>(b - a).count());
    for (const auto& [id, e] : buf.snapshot()) {
      if (!e) continue;
      EXPECT_GE(e->view.timestamp, last_seen[id]);
      last_seen[id] = e->view.timestamp;
    }
    if (out) EXPECT_GE(out->cameras.size(), 2u);
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  stop.store(true);
  for (std::thread& t : producers) t.join();

  std::sort(tick_ms.begin(), tick_ms.end());
  const double median = tick_ms[tick_ms.size() / 2];
  EXPECT_LT(median, 5.0);
  EXPECT_LT(tick_ms.back(), 200.0);
  EXPECT_EQ(accepted.load() + buf.reorder_count(), attempts.load());
  EXPECT_GT(loop.emissions(), 100u);
}

TEST(RunFixedRate, StopsWhenInputsDone) {
  const Rig rig = ring(3);
  ViewBuffer buf(ids(rig));
  SteadyClock clock;
  FusionLoop loop(rig, FusionConfig{}, buf, clock);
  const double t = clock.now();
  for (const auto& [id, cam] : rig) buf.ingest(view_of(cam, t), t);
  std::atomic<bool> stop{false};
  int outputs = 0;
  const auto started = std::chrono::steady_clock::now();
  run_fixed_rate(
      loop, clock, stop,
      [&] { return std::chrono::steady_clock::now() - started > std::chrono::milliseconds(200); },
      [&](const FusionOutput&) { ++outputs; });
  EXPECT_GE(outputs, 10);
  EXPECT_LE(outputs, 30);
}

}  // namespace
}  // namespace mvpose
