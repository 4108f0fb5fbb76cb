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

#include <atomic>
#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "cli/commands.h"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

void add_weight_flags(CLI::App* app, mvpose::cli::WeightFlags& w) {
  app->add_option("--config", w.config, "JSON file with weight parameters");
  app->add_option("--weight-mode", w.mode, "uniform | score | all");
  app->add_option("--s-th", w.s_th, "score threshold");
  app->add_option("--d-min", w.d_min, "distance weight lower plateau edge (m)");
  app->add_option("--d-max", w.d_max, "distance weight upper plateau edge (m)");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = mvpose::cli;
  CLI::App app{"mvpose: multi-camera weighted triangulation of 3D human pose"};
  app.require_subcommand(1);

  cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "render a synthetic scene to detection streams");
  simulate->add_option("--scene", sim.scene, "scene config JSON")->required();
  simulate->add_option("--out", sim.out, "output directory")->required();
  simulate->add_option("--seed", sim.seed, "override the scene seed");

  cli::TriangulateArgs tri;
  auto* triangulate = app.add_subcommand("triangulate", "batch triangulation of recorded streams");
  triangulate->add_option("--rig", tri.rig, "rig JSON")->required();
  triangulate->add_option("streams", tri.streams, "2D skeleton streams (JSONL)")->required();
  triangulate->add_option("--out", tri.out, "output 3D skeleton stream")->required();
  triangulate->add_option("--tolerance", tri.tolerance, "grouping tolerance (s)");
  add_weight_flags(triangulate, tri.weights);

  cli::StreamArgs str;
  auto* stream = app.add_subcommand("stream", "fixed-rate fusion of asynchronous streams");
  stream->add_option("--rig", str.rig, "rig JSON")->required();
  stream->add_option("streams", str.streams, "2D skeleton streams (JSONL)")->required();
  stream->add_option("--out", str.out, "output directory")->required();
  stream->add_option("--tick-rate", str.tick_rate, "fusion rate (Hz)")->capture_default_str();
  stream->add_option("--horizon", str.horizon, "staleness horizon (s)")->capture_default_str();
  stream->add_option("--emit", str.emit, "every-tick | on-change")->capture_default_str();
  stream->add_flag("--virtual", str.virtual_clock, "deterministic replay on a virtual clock");
  stream->add_option("--ingest-delay", str.ingest_delay, "virtual mode arrival delay (s)");
  add_weight_flags(stream, str.weights);
  str.stop = &g_stop;

  cli::EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "per-joint position error against ground truth");
  evaluate->add_option("--estimate", ev.estimate, "3D skeleton stream")->required();
  evaluate->add_option("--truth", ev.truth, "ground-truth stream")->required();
  evaluate->add_option("--out", ev.out, "output directory")->required();
  evaluate->add_option("--tolerance", ev.tolerance, "timestamp matching tolerance (s)");
  evaluate->add_option("--label", ev.label, "label for the report")->capture_default_str();

  cli::AblateArgs ab;
  auto* ablate = app.add_subcommand("ablate", "compare weighting modes on one scene");
  ablate->add_option("--scene", ab.scene, "scene config JSON")->required();
  ablate->add_option("--out", ab.out, "output directory")->required();
  ablate->add_option("--seed", ab.seed, "override the scene seed");
  ablate->add_option("--modes", ab.modes, "modes to compare");
  add_weight_flags(ablate, ab.weights);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfig;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (*simulate) return cli::cmd_simulate(sim, std::cout, std::cerr);
  if (*triangulate) return cli::cmd_triangulate(tri, std::cout, std::cerr);
  if (*stream) return cli::cmd_stream(str, std::cout, std::cerr);
  if (*evaluate) return cli::cmd_evaluate(ev, std::cout, std::cerr);
  if (*ablate) return cli::cmd_ablate(ab, std::cout, std::cerr);
  return cli::kExitConfig;
}
