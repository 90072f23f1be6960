#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace miner {

// 64-bit FNV-1a. Stable across platforms, used for config and artifact hashes.
std::uint64_t fnv1a64(std::string_view bytes);

// Lower-case 16-digit hex rendering of a hash value.
std::string hex64(std::uint64_t value);

// Derives an independent seed for a named stage from the pipeline seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage);

// mt19937_64 is fully specified by the standard; the distributions in
// <random> are not, so the helpers below are used wherever results must be
// reproducible across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 bits of randomness.
double uniform_unit(Rng& rng);

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Reads a whole file; throws InputError when it cannot be opened.
std::string read_file(const std::string& path);

// Splits on '\n', strips a trailing '\r' from each line and a UTF-8 BOM from
// the first line.
std::vector<std::string> split_lines(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace miner
