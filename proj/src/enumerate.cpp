#include "csp/enumerate.hpp"

#include <stdexcept>
#include <string>

namespace csp {

std::vector<Partition> enumerate_partitions(int n) {
  if (n < 0 || n > kMaxEnumerationSize) {
    throw std::domain_error("enumerate_partitions: n must be in [0, " +
                            std::to_string(kMaxEnumerationSize) + "]");
  }
  std::vector<Partition> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  // a[i] is the block of index i+1; a[0] = 0 and a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(n, 0);
  std::vector<int> running_max(n, 0);
  for (;;) {
    const int k = running_max[n - 1] + 1;
    std::vector<Block> blocks(k);
    for (int i = 0; i < n; ++i) blocks[a[i]].push_back(i + 1);
    out.emplace_back(n, std::move(blocks));

    int i = n - 1;
    while (i > 0 && a[i] == running_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++a[i];
    running_max[i] = std::max(running_max[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      running_max[j] = running_max[i];
    }
  }
  return out;
}

}  // namespace csp
