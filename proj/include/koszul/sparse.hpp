#pragma once

#include <map>
#include <utility>
#include <vector>

#include "koszul/errors.hpp"
#include "koszul/gaussian_rational.hpp"

namespace koszul {

/// Sparse vector over Q(i): sorted (index, value) pairs, no stored zeros.
struct SparseVector {
  int dim = 0;
  std::vector<std::pair<int, Q>> terms;

  SparseVector() = default;
  explicit SparseVector(int dim_) : dim(dim_) {}

  bool is_zero() const { return terms.empty(); }
  int leading_index() const { return terms.empty() ? -1 : terms.front().first; }
  const Q& leading_value() const { return terms.front().second; }

  Q at(int i) const {
    for (const auto& [idx, v] : terms)
      if (idx == i) return v;
    return Q(0);
  }

  void set(int i, Q v) {
    for (auto it = terms.begin(); it != terms.end(); ++it) {
      if (it->first == i) {
        if (v.is_zero())
          terms.erase(it);
        else
          it->second = std::move(v);
        return;
      }
      if (it->first > i) {
        if (!v.is_zero()) terms.insert(it, {i, std::move(v)});
        return;
      }
    }
    if (!v.is_zero()) terms.emplace_back(i, std::move(v));
  }

  bool operator==(const SparseVector&) const = default;
};

/// this = a*this + b*other (merged in one pass).
SparseVector linear_combine(const Q& a, const SparseVector& x, const Q& b,
                            const SparseVector& y);
SparseVector scale(const Q& a, const SparseVector& x);

/// Sparse matrix: entries keyed by (row, col); absent means zero.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void add(int r, int c, const Q& v) {
    check_bounds(r, c);
    if (v.is_zero()) return;
    auto key = std::make_pair(r, c);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      entries_.emplace(key, v);
    } else {
      it->second += v;
      if (it->second.is_zero()) entries_.erase(it);
    }
  }

  Q at(int r, int c) const {
    auto it = entries_.find({r, c});
    return it == entries_.end() ? Q(0) : it->second;
  }

  const std::map<std::pair<int, int>, Q>& entries() const { return entries_; }
  size_t nnz() const { return entries_.size(); }

  /// Rows as sparse vectors of length cols().
  std::vector<SparseVector> row_vectors() const;

  SparseVector apply(const SparseVector& x) const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  void check_bounds(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
      throw Error("sparse matrix index out of bounds");
  }
  int rows_ = 0, cols_ = 0;
  std::map<std::pair<int, int>, Q> entries_;
};

}  // namespace koszul
