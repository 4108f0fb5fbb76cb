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

// Offline (frame-synchronous) triangulation over recorded per-camera streams.

#ifndef MVPOSE_PIPELINE_H_
#define MVPOSE_PIPELINE_H_

#include <map>
#include <vector>

#include "mvpose/geometry.h"
#include "mvpose/skeleton.h"
#include "mvpose/weights.h"

namespace mvpose {

using ViewStreams = std::map<CameraId, std::vector<Skeleton2D>>;
using ViewSet = std::map<CameraId, Skeleton2D>;

struct FrameGroup {
  double timestamp = 0.0;  // earliest capture time in the group
  ViewSet views;
};

// Median spacing of consecutive timestamps over all streams; 0 when no
// stream has two frames.
double estimate_capture_period(const ViewStreams& streams);

// Clusters views whose capture timestamps lie within `tolerance` of the
// cluster's first timestamp. Each camera contributes at most its view nearest
// to that first timestamp. Groups come out in time order.
std::vector<FrameGroup> group_by_timestamp(const ViewStreams& streams, double tolerance);

// Triangulates every group in order, feeding each output as the prior of the
// next. Groups with fewer than two views yield a skeleton with no joints.
std::vector<Skeleton3D> triangulate_sequence(const std::vector<FrameGroup>& groups,
                                             const Rig& rig, const WeightParams& params);

}  // namespace mvpose

#endif  // MVPOSE_PIPELINE_H_
