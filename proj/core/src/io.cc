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

#include "mvpose/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mvpose/error.h"

namespace mvpose::io {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

json parse_json(std::string_view text, std::size_t base_offset = 0) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t byte = base_offset + e.byte;
    throw ParseError("malformed JSON at byte " + std::to_string(byte) + ": " + e.what(), byte);
  }
}

// Runs `f`, turning JSON type/shape errors into ParseError.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  } catch (const InvariantViolation& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Vec3 vec3_or(const json& j, const char* key, const Vec3& fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : vec3(*it);
}

ojson vec3_json(const Vec3& v) { return ojson::array({v.x(), v.y(), v.z()}); }

CameraIntrinsics parse_intrinsics(const json& j, const CameraIntrinsics& base) {
  CameraIntrinsics k = base;
  k.fx = get_or(j, "fx", k.fx);
  k.fy = get_or(j, "fy", k.fy);
  k.cx = get_or(j, "cx", k.cx);
  k.cy = get_or(j, "cy", k.cy);
  k.width = get_or(j, "width", k.width);
  k.height = get_or(j, "height", k.height);
  return k;
}

ojson intrinsics_json(const CameraIntrinsics& k) {
  ojson j;
  j["fx"] = k.fx;
  j["fy"] = k.fy;
  j["cx"] = k.cx;
  j["cy"] = k.cy;
  j["width"] = k.width;
  j["height"] = k.height;
  return j;
}

std::string_view motion_name(MotionKind k) { return k == MotionKind::kWalk ? "walk" : "tpose"; }

double finite_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite field '") + key + "'");
  return v;
}

Skeleton2D skeleton2d_from(const json& j) {
  Skeleton2D sk;
  sk.timestamp = finite_number(j, "t");
  sk.camera = j.at("camera").get<CameraId>();
  for (const auto& [name, d] : j.at("joints").items()) {
    Detection2D det{finite_number(d, "u"), finite_number(d, "v"), finite_number(d, "score")};
    det.validate();
    sk.joints.set(joint_from_name(name), det);
  }
  return sk;
}

Skeleton3D skeleton3d_from(const json& j) {
  Skeleton3D sk;
  sk.timestamp = finite_number(j, "t");
  for (const auto& [name, e] : j.at("joints").items()) {
    JointEstimate est;
    est.position = Vec3(finite_number(e, "x"), finite_number(e, "y"), finite_number(e, "z"));
    est.residual = get_or(e, "residual", 0.0);
    est.cameras_used = get_or(e, "cameras_used", 0);
    sk.joints.set(joint_from_name(name), est);
  }
  return sk;
}

template <typename T, typename F>
std::vector<T> parse_lines(std::string_view text, const char* what, F&& from) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      const json j = parse_json(line, pos);
      out.push_back(guarded(what, [&] { return from(j); }));
    }
    pos = end + 1;
  }
  return out;
}

ojson json_number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

Rig parse_rig(std::string_view text) {
  const json doc = parse_json(text);
  return guarded("rig", [&] {
    if (!doc.is_array()) throw ParseError("rig: top level must be an array");
    Rig rig;
    for (const json& c : doc) {
      const CameraId id = c.at("id").get<CameraId>();
      const CameraIntrinsics intr = parse_intrinsics(c.at("intrinsics"), CameraIntrinsics{});
      const json& e = c.at("extrinsics");
      const json& r = e.at("rotation");
      if (!r.is_array() || r.size() != 9) throw ParseError("rig: rotation needs 9 numbers");
      CameraExtrinsics extr;
      for (int i = 0; i < 9; ++i) extr.rotation(i / 3, i % 3) = r[static_cast<std::size_t>(i)].get<double>();
      extr.translation = vec3(e.at("translation"));
      if (rig.count(id)) throw ParseError("rig: duplicate camera id " + std::to_string(id));
      rig.emplace(id, Camera(id, intr, extr));
    }
    return rig;
  });
}

std::string rig_to_json(const Rig& rig) {
  ojson doc = ojson::array();
  for (const auto& [id, cam] : rig) {
    ojson c;
    c["id"] = id;
    c["intrinsics"] = intrinsics_json(cam.intrinsics());
    ojson rot = ojson::array();
    for (int i = 0; i < 9; ++i) rot.push_back(cam.extrinsics().rotation(i / 3, i % 3));
    c["extrinsics"]["rotation"] = rot;
    c["extrinsics"]["translation"] = vec3_json(cam.extrinsics().translation);
    doc.push_back(c);
  }
  return doc.dump(2) + "\n";
}

SceneConfig parse_scene_config(std::string_view text) {
  const json doc = parse_json(text);
  return guarded("scene config", [&] {
    if (!doc.is_object()) throw ParseError("scene config: top level must be an object");
    SceneConfig cfg;
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
    cfg.fps = get_or(doc, "fps", cfg.fps);
    if (auto it = doc.find("rig"); it != doc.end()) {
      const json& r = *it;
      cfg.rig.count = get_or(r, "count", cfg.rig.count);
      cfg.rig.radius = get_or(r, "radius", cfg.rig.radius);
      cfg.rig.height = get_or(r, "height", cfg.rig.height);
      cfg.rig.target = vec3_or(r, "target", cfg.rig.target);
      if (auto k = r.find("intrinsics"); k != r.end()) {
        cfg.rig.intrinsics = parse_intrinsics(*k, cfg.rig.intrinsics);
      }
      if (auto o = r.find("overrides"); o != r.end()) {
        for (const json& p : *o) {
          cfg.rig.overrides.push_back(CameraPlacement{p.at("id").get<CameraId>(),
                                                      vec3(p.at("position")),
                                                      vec3(p.at("target"))});
        }
      }
    }
    if (auto it = doc.find("motion"); it != doc.end()) {
      const json& m = *it;
      const std::string type = get_or<std::string>(m, "type", "tpose");
      if (type == "tpose" || type == "TPose") {
        cfg.motion.kind = MotionKind::kTPose;
      } else if (type == "walk" || type == "Walk") {
        cfg.motion.kind = MotionKind::kWalk;
      } else {
        throw ParseError("scene config: unknown motion type '" + type + "'");
      }
      cfg.motion.duration = get_or(m, "duration", cfg.motion.duration);
      cfg.motion.speed = get_or(m, "speed", cfg.motion.speed);
      cfg.motion.half_extent = get_or(m, "half_extent", cfg.motion.half_extent);
      cfg.motion.heading = get_or(m, "heading", cfg.motion.heading);
    }
    if (auto it = doc.find("noise"); it != doc.end()) {
      cfg.noise.pixel_sigma = get_or(*it, "pixel_sigma", cfg.noise.pixel_sigma);
      cfg.noise.score_clean = get_or(*it, "score_clean", cfg.noise.score_clean);
      cfg.noise.score_sigma = get_or(*it, "score_sigma", cfg.noise.score_sigma);
    }
    if (auto it = doc.find("occlusions"); it != doc.end()) {
      for (const json& o : *it) {
        OcclusionSpec spec;
        spec.camera = o.at("camera").get<CameraId>();
        for (const json& name : o.at("joints")) {
          spec.joints.push_back(joint_from_name(name.get<std::string>()));
        }
        spec.t0 = get_or(o, "t0", 0.0);
        spec.t1 = get_or(o, "t1", 1e300);
        const std::string mode = get_or<std::string>(o, "mode", "drop");
        if (mode == "drop" || mode == "Drop") {
          spec.mode = OcclusionMode::kDrop;
        } else if (mode == "corrupt" || mode == "Corrupt") {
          spec.mode = OcclusionMode::kCorrupt;
          spec.offset_px = o.at("offset_px").get<double>();
          spec.score = o.at("score").get<double>();
        } else {
          throw ParseError("scene config: unknown occlusion mode '" + mode + "'");
        }
        cfg.occlusions.push_back(std::move(spec));
      }
    }
    if (auto it = doc.find("body"); it != doc.end()) {
      Anthropometry& b = cfg.body;
      b.upper_arm = get_or(*it, "upper_arm", b.upper_arm);
      b.forearm = get_or(*it, "forearm", b.forearm);
      b.upper_leg = get_or(*it, "upper_leg", b.upper_leg);
      b.lower_leg = get_or(*it, "lower_leg", b.lower_leg);
      b.shoulder_width = get_or(*it, "shoulder_width", b.shoulder_width);
      b.hip_width = get_or(*it, "hip_width", b.hip_width);
      b.torso = get_or(*it, "torso", b.torso);
      b.ankle_height = get_or(*it, "ankle_height", b.ankle_height);
    }
    cfg.validate();
    return cfg;
  });
}

std::string scene_config_to_json(const SceneConfig& cfg) {
  ojson doc;
  doc["seed"] = cfg.seed;
  doc["fps"] = cfg.fps;
  ojson& r = doc["rig"];
  r["count"] = cfg.rig.count;
  r["radius"] = cfg.rig.radius;
  r["height"] = cfg.rig.height;
  r["target"] = vec3_json(cfg.rig.target);
  r["intrinsics"] = intrinsics_json(cfg.rig.intrinsics);
  r["overrides"] = ojson::array();
  for (const CameraPlacement& p : cfg.rig.overrides) {
    ojson o;
    o["id"] = p.camera;
    o["position"] = vec3_json(p.position);
    o["target"] = vec3_json(p.target);
    r["overrides"].push_back(o);
  }
  ojson& m = doc["motion"];
  m["type"] = motion_name(cfg.motion.kind);
  m["duration"] = cfg.motion.duration;
  m["speed"] = cfg.motion.speed;
  m["half_extent"] = cfg.motion.half_extent;
  m["heading"] = cfg.motion.heading;
  doc["noise"]["pixel_sigma"] = cfg.noise.pixel_sigma;
  doc["noise"]["score_clean"] = cfg.noise.score_clean;
  doc["noise"]["score_sigma"] = cfg.noise.score_sigma;
  doc["occlusions"] = ojson::array();
  for (const OcclusionSpec& o : cfg.occlusions) {
    ojson jo;
    jo["camera"] = o.camera;
    jo["joints"] = ojson::array();
    for (JointId j : o.joints) jo["joints"].push_back(joint_name(j));
    jo["t0"] = o.t0;
    jo["t1"] = o.t1;
    jo["mode"] = o.mode == OcclusionMode::kDrop ? "drop" : "corrupt";
    if (o.mode == OcclusionMode::kCorrupt) {
      jo["offset_px"] = o.offset_px;
      jo["score"] = o.score;
    }
    doc["occlusions"].push_back(jo);
  }
  const Anthropometry& b = cfg.body;
  doc["body"] = ojson{{"upper_arm", b.upper_arm},     {"forearm", b.forearm},
                      {"upper_leg", b.upper_leg},     {"lower_leg", b.lower_leg},
                      {"shoulder_width", b.shoulder_width}, {"hip_width", b.hip_width},
                      {"torso", b.torso},             {"ankle_height", b.ankle_height}};
  return doc.dump(2) + "\n";
}

WeightParams parse_weight_params(std::string_view text, const WeightParams& base) {
  const json doc = parse_json(text);
  return guarded("weight params", [&] {
    WeightParams p = base;
    p.s_th = get_or(doc, "s_th", p.s_th);
    p.d_min = get_or(doc, "d_min", p.d_min);
    p.d_max = get_or(doc, "d_max", p.d_max);
    p.use_distance = get_or(doc, "use_distance", p.use_distance);
    p.use_orthogonality = get_or(doc, "use_orthogonality", p.use_orthogonality);
    if (auto it = doc.find("weight_mode"); it != doc.end()) {
      const std::string name = it->get<std::string>();
      const auto mode = parse_weight_mode(name);
      if (!mode) throw ParseError("weight params: unknown weight_mode '" + name + "'");
      p.weight_mode = *mode;
    }
    p.validate();
    return p;
  });
}

std::string weight_params_to_json(const WeightParams& p) {
  ojson doc;
  doc["s_th"] = p.s_th;
  doc["d_min"] = p.d_min;
  doc["d_max"] = p.d_max;
  doc["weight_mode"] = weight_mode_name(p.weight_mode);
  doc["use_distance"] = p.use_distance;
  doc["use_orthogonality"] = p.use_orthogonality;
  return doc.dump();
}

std::string skeleton2d_to_json(const Skeleton2D& sk) {
  ojson doc;
  doc["t"] = sk.timestamp;
  doc["camera"] = sk.camera;
  ojson joints = ojson::object();
  sk.joints.for_each([&](JointId j, const Detection2D& d) {
    joints[std::string(joint_name(j))] = ojson{{"u", d.u}, {"v", d.v}, {"score", d.score}};
  });
  doc["joints"] = std::move(joints);
  return doc.dump();
}

Skeleton2D parse_skeleton2d(std::string_view line) {
  const json j = parse_json(line);
  return guarded("2D skeleton", [&] { return skeleton2d_from(j); });
}

std::string skeleton3d_to_json(const Skeleton3D& sk) {
  ojson doc;
  doc["t"] = sk.timestamp;
  ojson joints = ojson::object();
  sk.joints.for_each([&](JointId j, const JointEstimate& e) {
    joints[std::string(joint_name(j))] =
        ojson{{"x", e.position.x()},     {"y", e.position.y()}, {"z", e.position.z()},
              {"residual", e.residual}, {"cameras_used", e.cameras_used}};
  });
  doc["joints"] = std::move(joints);
  return doc.dump();
}

Skeleton3D parse_skeleton3d(std::string_view line) {
  const json j = parse_json(line);
  return guarded("3D skeleton", [&] { return skeleton3d_from(j); });
}

std::vector<Skeleton2D> parse_skeleton2d_stream(std::string_view text) {
  return parse_lines<Skeleton2D>(text, "2D skeleton stream", skeleton2d_from);
}

std::vector<Skeleton3D> parse_skeleton3d_stream(std::string_view text) {
  return parse_lines<Skeleton3D>(text, "3D skeleton stream", skeleton3d_from);
}

std::string skeleton2d_stream(const std::vector<Skeleton2D>& views) {
  std::string out;
  for (const Skeleton2D& v : views) out += skeleton2d_to_json(v) + "\n";
  return out;
}

std::string skeleton3d_stream(const std::vector<Skeleton3D>& skeletons) {
  std::string out;
  for (const Skeleton3D& s : skeletons) out += skeleton3d_to_json(s) + "\n";
  return out;
}

std::string ground_truth_stream(const std::vector<GroundTruthFrame>& frames) {
  std::string out;
  for (const GroundTruthFrame& f : frames) out += skeleton3d_to_json(f.to_skeleton()) + "\n";
  return out;
}

std::vector<GroundTruthFrame> parse_ground_truth_stream(std::string_view text) {
  std::vector<GroundTruthFrame> frames;
  for (const Skeleton3D& sk : parse_skeleton3d_stream(text)) {
    if (sk.joints.size() != kJointCount) {
      throw ParseError("ground truth: every frame must carry all 14 joints");
    }
    GroundTruthFrame f;
    f.timestamp = sk.timestamp;
    for (JointId j : kAllJoints) f.joints[index_of(j)] = sk.joints.at(j).position;
    frames.push_back(f);
  }
  return frames;
}

std::string latency_records_csv_header() {
  return "camera_id,capture_to_ingest_s,ingest_to_output_s\n";
}

std::string latency_records_csv(const std::vector<LatencyRecord>& records) {
  std::string out;
  char buf[128];
  for (const LatencyRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%u,%.9f,%.9f\n", static_cast<unsigned>(r.camera),
                  r.capture_to_ingest, r.ingest_to_output);
    out += buf;
  }
  return out;
}

std::string mpjpe_json(const MpjpeReport& report, const std::string& label) {
  ojson doc;
  doc["label"] = label;
  doc["units"] = "mm";
  doc["std"] = "population";
  doc["average"] = "mean of per-joint means";
  doc["overall_mm"] = json_number_or_null(report.overall_mm);
  doc["matched_frames"] = report.matched_frames;
  ojson joints = ojson::object();
  for (JointId j : kAllJoints) {
    if (const JointError* e = report.joints.find(j)) {
      joints[std::string(joint_name(j))] =
          ojson{{"mean_mm", e->mean_mm}, {"std_mm", e->std_mm}, {"frames", e->frames}};
    } else {
      joints[std::string(joint_name(j))] = nullptr;
    }
  }
  doc["joints"] = std::move(joints);
  return doc.dump(2) + "\n";
}

std::string ablation_json(const AblationTable& table) {
  ojson doc = ojson::object();
  ojson modes = ojson::array();
  for (const AblationRow& r : table.rows) {
    modes.push_back(ojson::parse(mpjpe_json(r.report, std::string(weight_mode_name(r.mode)))));
  }
  doc["modes"] = std::move(modes);
  return doc.dump(2) + "\n";
}

std::string latency_json(const LatencyReport& report) {
  ojson doc;
  doc["configured_rate_hz"] = report.configured_rate_hz;
  doc["achieved_rate_hz"] = report.achieved_rate_hz;
  doc["mean_tick_cost_ms"] = report.mean_tick_cost_ms;
  ojson cams = ojson::array();
  for (const auto& [id, c] : report.cameras) {
    cams.push_back(ojson{{"camera", id},
                         {"mean_ingest_ms", c.mean_ingest_ms},
                         {"std_ingest_ms", c.std_ingest_ms},
                         {"mean_output_ms", c.mean_output_ms},
                         {"std_output_ms", c.std_output_ms},
                         {"samples", c.samples}});
  }
  doc["cameras"] = std::move(cams);
  return doc.dump(2) + "\n";
}

}  // namespace mvpose::io
