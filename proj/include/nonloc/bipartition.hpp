#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "nonloc/common.hpp"

namespace nonloc {

/// Which side of a bipartition an operation refers to.
enum class Side { A, B };

inline const char* side_name(Side s) { return s == Side::A ? "A" : "B"; }

/// A two-block split of the party indices {0, ..., n-1}. Blocks are kept
/// sorted; the canonical form places party 0 in block A.
class Bipartition {
public:
  Bipartition(std::vector<int> block_a, std::vector<int> block_b, int n_parties)
      : block_a_(std::move(block_a)), block_b_(std::move(block_b)), n_parties_(n_parties) {
    std::sort(block_a_.begin(), block_a_.end());
    std::sort(block_b_.begin(), block_b_.end());
    validate();
    canonical_ = !block_a_.empty() && block_a_.front() == 0;
  }

  const std::vector<int>& block_a() const { return block_a_; }
  const std::vector<int>& block_b() const { return block_b_; }
  int party_count() const { return n_parties_; }
  bool is_canonical() const { return canonical_; }

  /// The same split with the party-0 block as block A.
  Bipartition canonical() const {
    if (canonical_) return *this;
    return Bipartition(block_b_, block_a_, n_parties_);
  }

  const std::vector<int>& block(Side s) const { return s == Side::A ? block_a_ : block_b_; }

  bool operator==(const Bipartition& o) const {
    return block_a_ == o.block_a_ && block_b_ == o.block_b_;
  }

  std::string to_string() const {
    std::string out;
    for (size_t i = 0; i < block_a_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(block_a_[i]);
    }
    out += '|';
    for (size_t i = 0; i < block_b_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(block_b_[i]);
    }
    return out;
  }

private:
  void validate() const {
    if (block_a_.empty() || block_b_.empty())
      throw shape_error("bipartition blocks must both be nonempty");
    std::vector<int> all = block_a_;
    all.insert(all.end(), block_b_.begin(), block_b_.end());
    std::sort(all.begin(), all.end());
    if (static_cast<int>(all.size()) != n_parties_)
      throw shape_error("bipartition blocks must cover every party exactly once");
    for (int i = 0; i < n_parties_; ++i)
      if (all[static_cast<size_t>(i)] != i)
        throw shape_error("bipartition blocks must partition {0..n-1}, got party " +
                          std::to_string(all[static_cast<size_t>(i)]));
  }

  std::vector<int> block_a_;
  std::vector<int> block_b_;
  int n_parties_;
  bool canonical_;
};

/// All 2^{n-1} - 1 canonical bipartitions of n parties, sorted by
/// (|block A|, lexicographic block A). Requires n >= 3.
inline std::vector<Bipartition> enumerate_bipartitions(int n) {
  if (n < 3)
    throw parameter_error("bipartition enumeration needs at least 3 parties, got " +
                          std::to_string(n));
  std::vector<Bipartition> cuts;
  const unsigned long full = (1ul << (n - 1)) - 1ul;  // masks over parties 1..n-1
  for (unsigned long mask = 0; mask < full; ++mask) {
    std::vector<int> a{0};
    std::vector<int> b;
    for (int p = 1; p < n; ++p) {
      if (mask & (1ul << (p - 1)))
        a.push_back(p);
      else
        b.push_back(p);
    }
    cuts.emplace_back(std::move(a), std::move(b), n);
  }
  std::sort(cuts.begin(), cuts.end(), [](const Bipartition& x, const Bipartition& y) {
    if (x.block_a().size() != y.block_a().size())
      return x.block_a().size() < y.block_a().size();
    return x.block_a() < y.block_a();
  });
  return cuts;
}

}  // namespace nonloc
