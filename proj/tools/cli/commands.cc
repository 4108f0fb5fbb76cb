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

#include "commands.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include "mvpose/error.h"
#include "mvpose/fusion.h"
#include "mvpose/io.h"
#include "mvpose/metrics.h"
#include "mvpose/pipeline.h"
#include "mvpose/simulator.h"

namespace mvpose::cli {
namespace {

// Maps library errors to exit codes. Configuration inputs that cannot be
// read count as configuration errors, not I/O errors.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "mvpose: parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    err << "mvpose: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "mvpose: invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "mvpose: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "mvpose: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InsufficientCameras& e) {
    err << "mvpose: insufficient inputs: " << e.what() << "\n";
    return kExitInsufficient;
  } catch (const NoMatches& e) {
    err << "mvpose: evaluation mismatch: " << e.what() << "\n";
    return kExitNoMatches;
  } catch (const std::exception& e) {
    err << "mvpose: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

std::string read_config(const Path& path) {
  try {
    return io::read_file(path);
  } catch (const IoError& e) {
    throw ParseError(e.what());
  }
}

void prepare_dir(const Path& dir) {
  std::filesystem::create_directories(dir);
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("'" + dir.string() + "' is not a directory");
  }
}

ViewStreams load_streams(const std::vector<Path>& paths) {
  ViewStreams streams;
  for (const Path& p : paths) {
    for (Skeleton2D& v : io::parse_skeleton2d_stream(io::read_file(p))) {
      streams[v.camera].push_back(std::move(v));
    }
  }
  for (auto& [id, s] : streams) {
    std::stable_sort(s.begin(), s.end(),
                     [](const Skeleton2D& a, const Skeleton2D& b) { return a.timestamp < b.timestamp; });
  }
  return streams;
}

// Drops cameras the rig does not know and fails below two streams.
ViewStreams usable_streams(ViewStreams streams, const Rig& rig, std::ostream& err) {
  for (auto it = streams.begin(); it != streams.end();) {
    if (!rig.count(it->first)) {
      err << "mvpose: warning: camera " << it->first << " is not in the rig; ignored\n";
      it = streams.erase(it);
    } else {
      ++it;
    }
  }
  if (streams.size() < 2) {
    throw InsufficientCameras("need at least 2 camera streams matching the rig, got " +
                              std::to_string(streams.size()));
  }
  return streams;
}

double median_gap(std::vector<double> ts) {
  std::sort(ts.begin(), ts.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] > ts[i - 1]) gaps.push_back(ts[i] - ts[i - 1]);
  }
  if (gaps.empty()) return 0.0;
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Stream time advancing at wall-clock pace from `t0`.
class ReplayClock : public Clock {
 public:
  explicit ReplayClock(double t0) : t0_(t0), base_(std::chrono::steady_clock::now()) {}
  double now() const override {
    return t0_ + std::chrono::duration<double>(std::chrono::steady_clock::now() - base_).count();
  }
  std::chrono::steady_clock::time_point wall_at(double t) const {
    return base_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(t - t0_));
  }

 private:
  double t0_;
  std::chrono::steady_clock::time_point base_;
};

}  // namespace

WeightParams resolve_weights(const WeightFlags& flags) {
  WeightParams p;
  if (flags.config) p = io::parse_weight_params(read_config(*flags.config), p);
  if (flags.mode) {
    const auto m = parse_weight_mode(*flags.mode);
    if (!m) throw ParseError("unknown weight mode '" + *flags.mode + "'");
    p.weight_mode = *m;
  }
  if (flags.s_th) p.s_th = *flags.s_th;
  if (flags.d_min) p.d_min = *flags.d_min;
  if (flags.d_max) p.d_max = *flags.d_max;
  p.validate();
  return p;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SceneConfig cfg = io::parse_scene_config(read_config(args.scene));
    if (args.seed) cfg.seed = *args.seed;
    const Rig rig = build_rig(cfg.rig);
    const std::vector<GroundTruthFrame> gt = generate_ground_truth(cfg);
    const ViewStreams streams = render_detections(gt, rig, cfg);

    prepare_dir(args.out);
    io::write_file(args.out / "scene.json", io::scene_config_to_json(cfg));
    io::write_file(args.out / "rig.json", io::rig_to_json(rig));
    io::write_file(args.out / "truth.jsonl", io::ground_truth_stream(gt));
    for (const auto& [id, views] : streams) {
      io::write_file(args.out / ("cam" + std::to_string(id) + ".jsonl"),
                     io::skeleton2d_stream(views));
    }
    out << "simulated " << gt.size() << " frames, " << streams.size() << " cameras -> "
        << args.out.string() << "\n";
    return kExitOk;
  });
}

int cmd_triangulate(const TriangulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Rig rig = io::parse_rig(read_config(args.rig));
    const WeightParams params = resolve_weights(args.weights);
    const ViewStreams streams = usable_streams(load_streams(args.streams), rig, err);
    const double tolerance =
        args.tolerance ? *args.tolerance : 0.5 * estimate_capture_period(streams);
    if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be non-negative");

    const std::vector<FrameGroup> groups = group_by_timestamp(streams, tolerance);
    const std::vector<Skeleton3D> skeletons = triangulate_sequence(groups, rig, params);
    if (args.out.has_parent_path()) prepare_dir(args.out.parent_path());
    io::write_file(args.out, io::skeleton3d_stream(skeletons));
    out << "triangulated " << skeletons.size() << " frames from " << streams.size()
        << " streams (" << weight_mode_name(params.weight_mode) << ") -> " << args.out.string()
        << "\n";
    return kExitOk;
  });
}

int cmd_stream(const StreamArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Rig rig = io::parse_rig(read_config(args.rig));
    FusionConfig cfg;
    cfg.weight_params = resolve_weights(args.weights);
    cfg.tick_rate = args.tick_rate;
    cfg.staleness_horizon = args.horizon;
    if (args.emit == "every-tick") {
      cfg.emit_policy = EmitPolicy::kEveryTick;
    } else if (args.emit == "on-change") {
      cfg.emit_policy = EmitPolicy::kOnChange;
    } else {
      throw ParseError("unknown emit policy '" + args.emit + "'");
    }
    cfg.validate();
    if (!(args.ingest_delay >= 0.0)) throw InvalidArgument("ingest delay must be non-negative");

    const ViewStreams streams = usable_streams(load_streams(args.streams), rig, err);
    double t0 = std::numeric_limits<double>::infinity();
    double t1 = -std::numeric_limits<double>::infinity();
    for (const auto& [id, s] : streams) {
      if (s.empty()) continue;
      t0 = std::min(t0, s.front().timestamp);
      t1 = std::max(t1, s.back().timestamp);
    }
    if (!std::isfinite(t0)) throw InsufficientCameras("all streams are empty");

    prepare_dir(args.out);
    std::ofstream fused(args.out / "fused.jsonl", std::ios::binary | std::ios::trunc);
    if (!fused) throw IoError("cannot open '" + (args.out / "fused.jsonl").string() + "'");

    std::vector<LatencyRecord> records;
    std::vector<double> output_times;
    std::vector<double> tick_costs;
    std::uint64_t reorders = 0;
    auto sink = [&](const FusionOutput& o) {
      fused << io::skeleton3d_to_json(o.skeleton) << "\n";
      records.insert(records.end(), o.latency.begin(), o.latency.end());
      output_times.push_back(o.skeleton.timestamp);
      tick_costs.push_back(o.tick_cost);
    };

    if (args.virtual_clock) {
      const double delay = args.ingest_delay;
      ReplayResult r = replay_virtual(streams, rig, cfg, t0, t1 + delay,
                                      [delay](CameraId) { return delay; });
      for (const FusionOutput& o : r.outputs) sink(o);
      reorders = r.reorders;
    } else {
      std::vector<CameraId> ids;
      for (const auto& [id, cam] : rig) ids.push_back(id);
      ViewBuffer buffer(ids);
      ReplayClock clock(t0);
      FusionLoop loop(rig, cfg, buffer, clock);
      static const std::atomic<bool> kNever{false};
      const std::atomic<bool>& external = args.stop ? *args.stop : kNever;
      std::atomic<bool> halt{false};
      std::atomic<std::size_t> finished{0};

      std::vector<std::thread> producers;
      for (const auto& [id, s] : streams) {
        producers.emplace_back([&, views = &s] {
          for (const Skeleton2D& v : *views) {
            const auto wake = clock.wall_at(v.timestamp);
            while (std::chrono::steady_clock::now() < wake) {
              if (halt.load() || external.load()) {
                finished.fetch_add(1);
                return;
              }
              std::this_thread::sleep_until(
                  std::min(wake, std::chrono::steady_clock::now() + std::chrono::milliseconds(20)));
            }
            buffer.ingest(v, clock.now());
          }
          finished.fetch_add(1);
        });
      }
      run_fixed_rate(loop, clock, external, [&] { return finished.load() == producers.size(); },
                     sink);
      halt.store(true);
      for (std::thread& t : producers) t.join();
      reorders = buffer.reorder_count();
      if (external.load()) err << "mvpose: interrupted; flushing partial output\n";
    }

    fused.flush();
    if (!fused) throw IoError("error writing fused.jsonl");
    io::write_file(args.out / "latency.csv",
                   io::latency_records_csv_header() + io::latency_records_csv(records));
    if (output_times.empty()) {
      err << "mvpose: warning: the fusion loop produced no output\n";
      return kExitOk;
    }
    const LatencyReport report = latency_report(records, output_times, cfg, tick_costs);
    io::write_file(args.out / "latency_summary.csv", latency_csv(report));
    io::write_file(args.out / "latency.json", io::latency_json(report));
    out << "fused " << output_times.size() << " outputs at " << format_ms(report.achieved_rate_hz)
        << " Hz (configured " << format_ms(cfg.tick_rate) << " Hz), " << reorders
        << " reordered views dropped\n";
    for (const auto& [id, c] : report.cameras) {
      out << "  camera " << id << ": capture->ingest " << format_ms(c.mean_ingest_ms)
          << " ms, ingest->output " << format_ms(c.mean_output_ms) << " ms\n";
    }
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<Skeleton3D> est = io::parse_skeleton3d_stream(io::read_file(args.estimate));
    const std::vector<GroundTruthFrame> truth =
        io::parse_ground_truth_stream(io::read_file(args.truth));
    double tolerance = 1e-6;
    if (args.tolerance) {
      tolerance = *args.tolerance;
    } else {
      std::vector<double> ts;
      for (const auto& f : truth) ts.push_back(f.timestamp);
      if (const double gap = median_gap(ts); gap > 0.0) tolerance = 0.5 * gap;
    }
    if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be non-negative");

    const MpjpeReport report = mpjpe(est, truth, tolerance);
    prepare_dir(args.out);
    io::write_file(args.out / "mpjpe.csv", mpjpe_csv(report, args.label));
    io::write_file(args.out / "mpjpe.json", io::mpjpe_json(report, args.label));
    out << "Average MPJPE: " << format_ms(report.overall_mm) << " mm over "
        << report.matched_frames << " frames\n";
    return kExitOk;
  });
}

int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SceneConfig cfg = io::parse_scene_config(read_config(args.scene));
    if (args.seed) cfg.seed = *args.seed;
    const WeightParams base = resolve_weights(args.weights);
    std::vector<WeightMode> modes;
    for (const std::string& name : args.modes) {
      const auto m = parse_weight_mode(name);
      if (!m) throw ParseError("unknown weight mode '" + name + "'");
      modes.push_back(*m);
    }
    const Rig rig = build_rig(cfg.rig);
    const AblationTable table = ablation_report(cfg, rig, modes, base);
    prepare_dir(args.out);
    io::write_file(args.out / "mpjpe.csv", mpjpe_csv(table));
    io::write_file(args.out / "ablation.json", io::ablation_json(table));
    for (const AblationRow& r : table.rows) {
      out << weight_mode_name(r.mode) << ": " << format_ms(r.report.overall_mm) << " mm\n";
    }
    return kExitOk;
  });
}

}  // namespace mvpose::cli
