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

#include "myodyn/trainer/windows.h"

#include <cmath>
#include <string>

#include "myodyn/error.h"
#include "myodyn/log.h"

namespace myodyn {

std::vector<std::size_t> WindowStarts(std::size_t length, int window,
                                      int stride) {
  if (window < 1 || stride < 1) {
    Fail(ErrorKind::kConfig, "window and stride must be positive");
  }
  std::vector<std::size_t> starts;
  const auto w = static_cast<std::size_t>(window);
  if (length < w) return starts;
  for (std::size_t s = 0; s + w <= length; s += static_cast<std::size_t>(stride)) {
    starts.push_back(s);
  }
  return starts;
}

std::vector<WindowRef> SegmentWindows(const std::vector<std::size_t>& lengths,
                                      int window, int stride) {
  std::vector<WindowRef> out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const auto starts = WindowStarts(lengths[i], window, stride);
    if (starts.empty()) {
      LogWarning("trajectory " + std::to_string(i) + " has " +
                 std::to_string(lengths[i]) + " samples, shorter than window " +
                 std::to_string(window) + "; skipped");
    }
    for (std::size_t s : starts) out.push_back({i, s});
  }
  return out;
}

WindowSplit SplitTrainTest(const std::vector<std::size_t>& lengths,
                           const std::vector<WindowRef>& windows, int window,
                           double split) {
  if (!(split > 0.0 && split < 1.0)) {
    Fail(ErrorKind::kConfig, "split must lie strictly between 0 and 1");
  }
  WindowSplit out;
  out.boundary.reserve(lengths.size());
  for (std::size_t len : lengths) {
    out.boundary.push_back(
        static_cast<std::size_t>(std::floor(split * static_cast<double>(len))));
  }
  const auto w = static_cast<std::size_t>(window);
  for (const WindowRef& ref : windows) {
    if (ref.trajectory >= lengths.size()) {
      Fail(ErrorKind::kDimension, "window refers to a missing trajectory");
    }
    const std::size_t b = out.boundary[ref.trajectory];
    if (ref.start + w <= b) {
      out.train.push_back(ref);
    } else if (ref.start >= b) {
      out.test.push_back(ref);
    } else {
      ++out.dropped;
    }
  }
  return out;
}

}  // namespace myodyn
