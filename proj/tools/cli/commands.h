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

// Subcommands of the mvpose tool. Each returns a process exit status and
// writes diagnostics to `err`:
//   0 ok, 1 internal error, 2 config/parse, 3 I/O, 4 insufficient inputs,
//   5 evaluation mismatch.

#ifndef MVPOSE_TOOLS_CLI_COMMANDS_H_
#define MVPOSE_TOOLS_CLI_COMMANDS_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mvpose/weights.h"

namespace mvpose::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitInsufficient = 4,
  kExitNoMatches = 5,
};

using Path = std::filesystem::path;

// Command-line overrides applied on top of an optional JSON weight file.
struct WeightFlags {
  std::optional<Path> config;
  std::optional<std::string> mode;
  std::optional<double> s_th;
  std::optional<double> d_min;
  std::optional<double> d_max;
};

// Throws ParseError / InvariantViolation on bad values.
WeightParams resolve_weights(const WeightFlags& flags);

struct SimulateArgs {
  Path scene;
  Path out;  // directory: rig.json, scene.json, truth.jsonl, cam<id>.jsonl
  std::optional<std::uint64_t> seed;
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct TriangulateArgs {
  Path rig;
  std::vector<Path> streams;
  Path out;  // 3D skeleton stream file
  WeightFlags weights;
  std::optional<double> tolerance;  // default: half the capture period
};
int cmd_triangulate(const TriangulateArgs& args, std::ostream& out, std::ostream& err);

struct StreamArgs {
  Path rig;
  std::vector<Path> streams;
  Path out;  // directory: fused.jsonl, latency.csv, latency_summary.csv, latency.json
  WeightFlags weights;
  double tick_rate = 100.0;
  double horizon = 0.5;
  std::string emit = "every-tick";  // or "on-change"
  // Deterministic replay under a virtual clock instead of wall-clock pacing.
  bool virtual_clock = false;
  double ingest_delay = 0.0;  // virtual mode: arrival = capture + delay
  const std::atomic<bool>* stop = nullptr;
};
int cmd_stream(const StreamArgs& args, std::ostream& out, std::ostream& err);

struct EvaluateArgs {
  Path estimate;
  Path truth;
  Path out;  // directory: mpjpe.csv, mpjpe.json
  std::optional<double> tolerance;  // default: half the truth frame period
  std::string label = "estimate";
};
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);

struct AblateArgs {
  Path scene;
  Path out;  // directory: mpjpe.csv, ablation.json
  std::optional<std::uint64_t> seed;
  WeightFlags weights;
  std::vector<std::string> modes = {"uniform", "score", "all"};
};
int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace mvpose::cli

#endif  // MVPOSE_TOOLS_CLI_COMMANDS_H_
