#pragma once

#include <cstdint>

#include "kuznets/bipartite.hpp"

namespace kuznets {

/// NODF nestedness (0..100) for the matrix in its current row and column
/// order: a pair contributes only when the earlier row (column) has strictly
/// larger degree, and then by the share of the later one's entries it covers.
double nodf(const BinaryMatrix& m);

/// Null-model sample with the same row and column degrees, from random
/// checkerboard swaps (`swaps_per_entry` attempts per one in the matrix).
BinaryMatrix degree_preserving_shuffle(const BinaryMatrix& m, std::uint64_t seed, double swaps_per_entry = 10.0);

}  // namespace kuznets
