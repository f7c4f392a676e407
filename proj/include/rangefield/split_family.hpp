/*
 * Copyright 2026 The rangefield Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "rangefield/rng.hpp"

namespace rangefield {

/// A node of the complete 4-ary (or 2-ary) tree, encoded as its path from
/// the root below a leading 1 bit: the root is 1, child r of w is
/// (w << bits) | r with r counted from 0.
struct Word {
  std::uint64_t code = 1;
  int length = 0;

  friend bool operator==(const Word&, const Word&) = default;
};

/// Split coordinates attached to one node of the limit construction.
struct SplitPair {
  double u = 0.5;
  double v = 0.5;
};

/// The family {(U^w, V^w)} of independent uniforms indexed by tree words.
/// Values are a keyed hash of (seed, word), so any evaluation order sees
/// the same family and nothing has to be stored.
class SplitFamily {
 public:
  /// `arity` is 4 for the quadtree construction and 2 for kd trees.
  explicit SplitFamily(std::uint64_t seed, int arity = 4, Word root = {})
      : seed_(seed), arity_(arity), bits_(arity == 4 ? 2 : 1), root_(root) {
    if (arity != 2 && arity != 4) throw std::invalid_argument("arity must be 2 or 4");
  }

  std::uint64_t seed() const { return seed_; }
  int arity() const { return arity_; }
  Word root() const { return root_; }

  /// Longest word the encoding can hold.
  int max_length() const { return 62 / bits_; }

  Word child(Word w, int r) const {
    if (w.length >= max_length()) throw std::length_error("limit construction is too deep");
    return {(w.code << bits_) | static_cast<std::uint64_t>(r), w.length + 1};
  }

  /// The family rooted at child r of this family's root.
  SplitFamily subfamily(int r) const { return SplitFamily(seed_, arity_, child(root_, r)); }

  SplitPair at(Word w) const {
    const std::uint64_t k = keyed_hash(seed_ ^ static_cast<std::uint64_t>(arity_), w.code);
    return {to_open_unit(k), to_open_unit(splitmix64(k ^ 0xD1B54A32D192ED03ULL))};
  }

 private:
  std::uint64_t seed_;
  int arity_;
  int bits_;
  Word root_;
};

}  // namespace rangefield
