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

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fog/core/types.hpp"

namespace fog::envs {

/// One line of a trajectory dump. `score` and `frame` refer to next_state.
struct DumpRecord {
  int episode = 0;
  int t = 0;
  core::Vec state;
  core::Vec next_state;
  core::Vec action;
  core::Vec skill;
  double score = 1.0;
  std::string label;  // optional episode tag, e.g. "aligned" / "misaligned"
  std::string frame;  // PNG path relative to the dump file; empty when not dumped
};

/// Line-delimited JSON writer. Frames are written next to the dump under frames/.
class TrajectoryWriter {
 public:
  /// Pass an empty env_name to skip frame output.
  TrajectoryWriter(const std::filesystem::path& path, std::string env_name, bool write_frames);

  /// Trajectory states must be vector states.
  void write_episode(int episode, const core::Trajectory& traj, const std::string& label = "");
  void flush() { out_.flush(); }

 private:
  std::filesystem::path path_;
  std::string env_name_;
  bool write_frames_;
  std::ofstream out_;
};

std::string to_json_line(const DumpRecord& r);
DumpRecord parse_json_line(const std::string& line);

/// Reads every record of a dump. Throws IoError on unreadable files or bad lines.
std::vector<DumpRecord> read_dump(const std::filesystem::path& path);

/// Records grouped by episode, ordered by t.
std::vector<std::vector<DumpRecord>> group_episodes(const std::vector<DumpRecord>& records);

/// Converts a dumped episode back into a Trajectory over vector states.
core::Trajectory to_trajectory(const std::vector<DumpRecord>& episode);

}  // namespace fog::envs
