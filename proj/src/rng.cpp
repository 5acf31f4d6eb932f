#include "gpa/rng.hpp"

#include <algorithm>

namespace gpa {

std::vector<int> RngStream::sample_indices(int n, int k) {
  if (k >= n) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  // Partial Fisher-Yates: first k entries of a shuffle.
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(next_index(static_cast<uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gpa
