// Copyright 2026 The MyoDyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MYODYN_TRAINER_WINDOWS_H_
#define MYODYN_TRAINER_WINDOWS_H_

#include <cstddef>
#include <vector>

namespace myodyn {

// A fixed-length window into one trajectory.
struct WindowRef {
  std::size_t trajectory = 0;  // position in the dataset
  std::size_t start = 0;       // first sample index

  bool operator==(const WindowRef&) const = default;
};

// Start indices 0, s, 2s, ... of every full window; floor((L - w) / s) + 1 of
// them, none if L < w.
std::vector<std::size_t> WindowStarts(std::size_t length, int window,
                                      int stride);

// Windows of all trajectories, trajectory-major. Short trajectories yield no
// windows and a warning.
std::vector<WindowRef> SegmentWindows(const std::vector<std::size_t>& lengths,
                                      int window, int stride);

// Time-contiguous split. Each trajectory's boundary is floor(split * L):
// windows ending at or before it train, windows starting at or after it test,
// and windows straddling it are dropped so no sample is seen by both sides.
struct WindowSplit {
  std::vector<WindowRef> train;
  std::vector<WindowRef> test;
  std::size_t dropped = 0;
  std::vector<std::size_t> boundary;  // per trajectory
};

WindowSplit SplitTrainTest(const std::vector<std::size_t>& lengths,
                           const std::vector<WindowRef>& windows, int window,
                           double split);

}  // namespace myodyn

#endif  // MYODYN_TRAINER_WINDOWS_H_
