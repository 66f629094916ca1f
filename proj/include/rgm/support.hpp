#pragma once

#include <set>
#include <utility>

#include "rgm/errors.hpp"

namespace rgm {

/// The set of conditionally dependent index pairs over {0..m-1}. Diagonal
/// pairs are always members and are kept implicit; only off-diagonal pairs
/// (h < k) are stored.
class SupportPattern {
  public:
    using Pair = std::pair<int, int>;

    explicit SupportPattern(int m) : m_(m) {
        if (m < 1) throw std::invalid_argument("SupportPattern: m must be >= 1");
    }

    int m() const { return m_; }

    void add(int i, int j) {
        check(i);
        check(j);
        if (i == j) return;  // diagonal is implicit
        pairs_.insert(i < j ? Pair{i, j} : Pair{j, i});
    }

    bool contains(int i, int j) const {
        check(i);
        check(j);
        if (i == j) return true;
        return pairs_.count(i < j ? Pair{i, j} : Pair{j, i}) > 0;
    }

    const std::set<Pair>& offdiag_pairs() const { return pairs_; }
    int offdiag_count() const { return static_cast<int>(pairs_.size()); }

    bool operator==(const SupportPattern& other) const {
        return m_ == other.m_ && pairs_ == other.pairs_;
    }

  private:
    void check(int i) const {
        if (i < 0 || i >= m_) throw std::invalid_argument("SupportPattern: index out of range");
    }

    int m_;
    std::set<Pair> pairs_;
};

}  // namespace rgm
