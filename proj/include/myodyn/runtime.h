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

#ifndef MYODYN_RUNTIME_H_
#define MYODYN_RUNTIME_H_

namespace myodyn {

// Process-wide allocator tuning for training workloads: keeps large tensor
// buffers on the heap instead of fresh mmap regions, which otherwise cost a
// page-fault storm per step. No-op on non-glibc platforms. Call once from
// main().
void ConfigureAllocatorForTraining();

}  // namespace myodyn

#endif  // MYODYN_RUNTIME_H_
