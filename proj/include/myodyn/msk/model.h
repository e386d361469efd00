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

#ifndef MYODYN_MSK_MODEL_H_
#define MYODYN_MSK_MODEL_H_

#include <string>
#include <vector>

#include "myodyn/msk/joint.h"
#include "myodyn/msk/muscle.h"

namespace myodyn {

// A joint and the muscles spanning it.
struct MusculoskeletalModel {
  JointModel joint;
  std::vector<MuscleParams> muscles;

  std::size_t muscle_count() const { return muscles.size(); }
  std::vector<std::string> muscle_names() const;
};

// Parses a YAML model document. Every physical scalar is written as
// {value: X, unit: U}; angles accept rad or deg.
MusculoskeletalModel ParseModel(const std::string& text);
MusculoskeletalModel LoadModel(const std::string& path);

}  // namespace myodyn

#endif  // MYODYN_MSK_MODEL_H_
