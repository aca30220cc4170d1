// Copyright 2026 The MIQCQP-ES Authors
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

#ifndef MIQCQP_RANDOM_H_
#define MIQCQP_RANDOM_H_

#include <cstdint>
#include <random>

namespace miqcqp {

// Per-run random source. Owned by exactly one run; never shared.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1); 53 random mantissa bits, never returns 1.
  double Uniform();
  double Normal() { return normal_(engine_); }
  // Uniform integer on the closed interval [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// 64-bit FNV-1a. Fixed algorithm so derived seeds are identical on every
// platform and compiler.
std::uint64_t Fnv1a64(const void* data, std::size_t size,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace miqcqp

#endif  // MIQCQP_RANDOM_H_
