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

#include "mvpose/pipeline.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "mvpose/error.h"
#include "mvpose/triangulator.h"

namespace mvpose {

double estimate_capture_period(const ViewStreams& streams) {
  std::vector<double> gaps;
  for (const auto& [id, stream] : streams) {
    for (std::size_t i = 1; i < stream.size(); ++i) {
      const double dt = stream[i].timestamp - stream[i - 1].timestamp;
      if (dt > 0.0) gaps.push_back(dt);
    }
  }
  if (gaps.empty()) return 0.0;
  auto mid = gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid;
}

std::vector<FrameGroup> group_by_timestamp(const ViewStreams& streams, double tolerance) {
  struct Item {
    double t;
    CameraId camera;
    const Skeleton2D* view;
  };
  std::vector<Item> items;
  for (const auto& [id, stream] : streams) {
    for (const Skeleton2D& v : stream) items.push_back(Item{v.timestamp, id, &v});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return std::tie(a.t, a.camera) < std::tie(b.t, b.camera);
  });

  std::vector<FrameGroup> groups;
  std::size_t i = 0;
  while (i < items.size()) {
    FrameGroup g;
    g.timestamp = items[i].t;
    std::size_t j = i;
    for (; j < items.size() && items[j].t - g.timestamp <= tolerance; ++j) {
      const Item& it = items[j];
      auto existing = g.views.find(it.camera);
      // Items are time-sorted, so the first view per camera is nearest.
      if (existing == g.views.end()) g.views.emplace(it.camera, *it.view);
    }
    groups.push_back(std::move(g));
    i = j;
  }
  return groups;
}

std::vector<Skeleton3D> triangulate_sequence(const std::vector<FrameGroup>& groups,
                                             const Rig& rig, const WeightParams& params) {
  std::vector<Skeleton3D> out;
  out.reserve(groups.size());
  const Skeleton3D* prior = nullptr;
  for (const FrameGroup& g : groups) {
    Skeleton3D sk;
    try {
      sk = triangulate_skeleton(g.views, rig, params, prior);
    } catch (const InsufficientCameras&) {
      sk = Skeleton3D{};
      sk.timestamp = g.timestamp;
      for (const auto& [id, v] : g.views) sk.timestamp = std::max(sk.timestamp, v.timestamp);
    }
    out.push_back(std::move(sk));
    prior = out.back().joints.empty() ? prior : &out.back();
  }
  return out;
}

}  // namespace mvpose
