#pragma once

#include <vector>

#include "csp/alloc.hpp"

namespace csp {

/// Largest n accepted by enumerate_partitions (Bell(12) = 4213597).
inline constexpr int kMaxEnumerationSize = 12;

/// All set partitions of [n] in canonical form, generated from restricted
/// growth strings in lexicographic order. Throws std::domain_error for
/// n < 0 or n > kMaxEnumerationSize.
std::vector<Partition> enumerate_partitions(int n);

}  // namespace csp
