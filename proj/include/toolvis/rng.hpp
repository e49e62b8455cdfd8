// Copyright 2026 The Toolvis Authors
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

#ifndef TOOLVIS_RNG_HPP_
#define TOOLVIS_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace toolvis {

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream seed for item `index` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// mt19937_64 with distribution helpers defined here rather than by the
// standard library, so sequences are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform in [0, 1).
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  // Index drawn with probability proportional to weights[i].
  std::size_t weighted(std::span<const double> weights);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace toolvis

#endif  // TOOLVIS_RNG_HPP_
