#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace ccpd {

enum class MaskMode { Full, Hard, Soft };

// Per-letter decision to emit a diacritic, flattened over a sentence (or corpus)
// in reading order.
struct SelectionMask {
  std::vector<bool> marked;
  MaskMode mode = MaskMode::Full;
  double theta = 0.0;  // meaningful for MaskMode::Soft only

  static SelectionMask all(std::size_t n, bool value, MaskMode mode = MaskMode::Full) {
    SelectionMask m;
    m.marked.assign(n, value);
    m.mode = mode;
    return m;
  }

  std::size_t size() const noexcept { return marked.size(); }
  bool operator[](std::size_t i) const { return marked[i]; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(marked.begin(), marked.end(), true)); }

  // True when every position marked here is also marked in `other`.
  bool subset_of(const SelectionMask& other) const {
    if (other.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (marked[i] && !other.marked[i]) return false;
    return true;
  }
};

}  // namespace ccpd
