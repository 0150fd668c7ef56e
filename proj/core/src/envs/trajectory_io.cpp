/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "fog/envs/trajectory_io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>

#include "fog/core/errors.hpp"
#include "fog/core/image_io.hpp"
#include "fog/envs/env.hpp"

namespace fog::envs {

namespace {

using nlohmann::json;

json to_array(const core::Vec& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

core::Vec from_array(const json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const core::Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string frame_name(int episode, int t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "frames/ep%04d_t%03d.png", episode, t);
  return buf;
}

}  // namespace

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path, std::string env_name, bool write_frames)
    : path_(path), env_name_(std::move(env_name)), write_frames_(write_frames && !env_name_.empty()) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::out | std::ios::trunc);
  if (!out_) throw IoError("cannot open dump file " + path_.string());
  if (write_frames_) std::filesystem::create_directories(path_.parent_path() / "frames");
}

void TrajectoryWriter::write_episode(int episode, const core::Trajectory& traj, const std::string& label) {
  for (std::size_t t = 0; t < traj.length(); ++t) {
    DumpRecord r;
    r.episode = episode;
    r.t = static_cast<int>(t);
    r.state = traj.states[t].vec();
    r.next_state = traj.states[t + 1].vec();
    r.action = traj.actions[t];
    r.skill = traj.z.z();
    r.score = t < traj.scores.size() ? traj.scores[t] : 1.0;
    r.label = label;
    if (write_frames_) {
      r.frame = frame_name(episode, r.t);
      core::write_png(path_.parent_path() / r.frame, render_state(env_name_, r.next_state));
    }
    out_ << to_json_line(r) << '\n';
  }
  if (!out_) throw IoError("failed writing dump file " + path_.string());
}

std::string to_json_line(const DumpRecord& r) {
  json j;
  j["episode"] = r.episode;
  j["t"] = r.t;
  j["state_vec"] = to_array(r.state);
  j["next_state_vec"] = to_array(r.next_state);
  j["action"] = to_array(r.action);
  j["skill"] = to_array(r.skill);
  j["score"] = r.score;
  if (!r.label.empty()) j["label"] = r.label;
  if (!r.frame.empty()) j["frame"] = r.frame;
  return j.dump();
}

DumpRecord parse_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    DumpRecord r;
    r.episode = j.value("episode", 0);
    r.t = j.at("t").get<int>();
    r.state = from_array(j.at("state_vec"));
    if (j.contains("next_state_vec")) r.next_state = from_array(j.at("next_state_vec"));
    r.action = from_array(j.at("action"));
    r.skill = from_array(j.at("skill"));
    r.score = j.value("score", 1.0);
    r.label = j.value("label", std::string{});
    r.frame = j.value("frame", std::string{});
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed dump record: ") + e.what());
  }
}

std::vector<DumpRecord> read_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dump file " + path.string());
  std::vector<DumpRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

std::vector<std::vector<DumpRecord>> group_episodes(const std::vector<DumpRecord>& records) {
  std::map<int, std::vector<DumpRecord>> by_episode;
  for (const auto& r : records) by_episode[r.episode].push_back(r);
  std::vector<std::vector<DumpRecord>> out;
  for (auto& [_, eps] : by_episode) {
    std::stable_sort(eps.begin(), eps.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    out.push_back(std::move(eps));
  }
  return out;
}

core::Trajectory to_trajectory(const std::vector<DumpRecord>& episode) {
  core::Trajectory traj;
  if (episode.empty()) return traj;
  traj.z = core::Skill::normalized(episode.front().skill);
  traj.states.push_back(core::State::vector(episode.front().state));
  for (const auto& r : episode) {
    traj.actions.push_back(r.action);
    traj.scores.push_back(r.score);
    traj.states.push_back(core::State::vector(r.next_state.size() ? r.next_state : r.state));
  }
  return traj;
}

}  // namespace fog::envs
