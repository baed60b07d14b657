/*
 * gfc -- Green-function comparison toolkit
 *
 * Small self-contained utilities: a counter-based RNG, SHA-256 content
 * hashing for run manifests, and atomic file writes.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include <cstdint>
#include <string>

namespace gfc {

/*
 * Counter-based pseudo-random generator (Philox-style 2x64 bijection).
 * A (seed, counter) pair maps to a 64-bit word; streams are reproducible
 * and order-independent, so samples can be drawn in any order (or in
 * parallel) without changing the realized values.
 */
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  // Raw 64-bit word for counter value `ctr`.
  std::uint64_t word(std::uint64_t ctr) const;

  // Uniform double in [0, 1) for counter value `ctr`.
  double uniform(std::uint64_t ctr) const {
    return static_cast<double>(word(ctr) >> 11) * 0x1.0p-53;
  }

  // Sequential convenience interface.
  std::uint64_t next() { return word(auto_ctr_++); }
  double nextUniform() { return uniform(auto_ctr_++); }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t auto_ctr_ = 0;
};

// SHA-256 of a byte string, as a lowercase hex digest.
std::string sha256Hex(const std::string &data);

// SHA-256 of a file's contents; throws std::runtime_error if unreadable.
std::string sha256File(const std::string &path);

// Write `content` to `path` atomically (temp file + rename).
void atomicWrite(const std::string &path, const std::string &content);

// Read a whole file into a string; throws std::runtime_error on failure.
std::string readFile(const std::string &path);

} // namespace gfc
