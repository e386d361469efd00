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

#ifndef MYODYN_HARNESS_GRADIENT_AUDIT_H_
#define MYODYN_HARNESS_GRADIENT_AUDIT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "myodyn/autodiff/grad_check.h"
#include "myodyn/msk/model.h"

namespace myodyn {

struct AuditEntry {
  std::string name;
  ad::GradCheckReport report;
};

struct AuditResult {
  std::vector<AuditEntry> entries;
  double h = 1e-6;
  double tol = 1e-4;
  double seconds = 0.0;

  bool ok() const;
  double max_rel_err() const;
};

// Central-difference audit of every elementary op (at random points away
// from kinks, including broadcasting forms), a Hill tendon-force composition,
// a small BiGRU network, and the knowledge and supervised losses on a
// two-muscle model.
AuditResult RunGradientAudit(std::uint64_t seed = 7, double h = 1e-6,
                             double tol = 1e-4);

// A knee-like two-muscle model for small end-to-end checks.
MusculoskeletalModel TwoMuscleToyModel();

std::string FormatAudit(const AuditResult& result);

}  // namespace myodyn

#endif  // MYODYN_HARNESS_GRADIENT_AUDIT_H_
