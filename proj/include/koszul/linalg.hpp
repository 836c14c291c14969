#pragma once

#include <optional>
#include <vector>

#include "koszul/sparse.hpp"

namespace koszul {

/// A subspace of Q(i)^ambient, cached in reduced row echelon form so that
/// membership and containment are cheap.  Construction alone canonicalizes:
/// two equal subspaces compare equal whatever vectors they were built from.
class SubspaceBasis {
 public:
  explicit SubspaceBasis(int ambient_dim) : ambient_(ambient_dim) {}
  static SubspaceBasis from_vectors(int ambient_dim,
                                    const std::vector<SparseVector>& vectors);
  static SubspaceBasis full(int ambient_dim);

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  const std::vector<SparseVector>& vectors() const { return rows_; }
  const std::vector<int>& pivots() const { return pivots_; }

  /// Residual of v after eliminating against the basis; zero iff v lies here.
  SparseVector reduce(SparseVector v) const;
  bool contains(const SparseVector& v) const { return reduce(v).is_zero(); }
  bool contains(const SubspaceBasis& other) const;

  /// Basis vectors of this subspace that are independent modulo `sub`
  /// (a complement of sub inside this, deterministic).
  std::vector<SparseVector> complement_of(const SubspaceBasis& sub) const;

  bool operator==(const SubspaceBasis&) const = default;

 private:
  int ambient_ = 0;
  std::vector<SparseVector> rows_;   // RREF rows, pivot columns increasing
  std::vector<int> pivots_;
};

int rank(const SparseMatrix& m);
SubspaceBasis kernel_basis(const SparseMatrix& m);
SubspaceBasis image_basis(const SparseMatrix& m);

/// Canonical solution of m*x = b (least-index pivoting, free variables zero);
/// nullopt when b is not in the image.
std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b);

/// dim numerator - dim denominator; throws NotASubspace unless den <= num.
int quotient_dim(const SubspaceBasis& numerator, const SubspaceBasis& denominator);

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b);
SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b);

/// Image of each basis vector of `space` under m, as a subspace of Q^rows.
SubspaceBasis image_of_subspace(const SparseMatrix& m, const SubspaceBasis& space);

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace koszul
