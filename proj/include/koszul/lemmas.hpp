#pragma once

#include <optional>
#include <string>
#include <vector>

#include "koszul/cohomology.hpp"

namespace koszul {

/// One bidegree of a lemma comparison: dimensions of the two sides and, when
/// they differ, a machine-checkable witness in the left set but not the right
/// (with the preimage that produced it when one exists).
struct LemmaCell {
  int p = 0, q = 0;
  int lhs_dim = 0, rhs_dim = 0;
  std::optional<FormExpr> witness;
  std::string witness_str;
  std::string preimage_str;  // empty when the witness came from a quotient basis
  bool failed() const { return lhs_dim != rhs_dim; }
};

struct LemmaVerdict {
  std::string lemma;  // "ddbar" or "dpidbar"
  bool holds = false;
  std::vector<LemmaCell> cells;  // every bidegree, lex order
  /// First failing cell, when any.
  const LemmaCell* primary() const {
    for (const auto& c : cells)
      if (c.failed()) return &c;
    return nullptr;
  }
  const LemmaCell* cell_at(int p, int q) const {
    for (const auto& c : cells)
      if (c.p == p && c.q == q) return &c;
    return nullptr;
  }
};

/// ker del ^ ker dbar ^ im d = im del dbar, bidegree by bidegree.
LemmaVerdict check_deldbar(const Model& m, Exec exec = Exec::Parallel);

/// ker del_pi ^ ker dbar ^ im(del_pi + dbar) = im del_pi dbar, evaluated in
/// its three equivalent forms; they must agree or InternalInconsistency.
LemmaVerdict check_dpidbar(const Model& m, Exec exec = Exec::Parallel);

/// Re-derives from scratch that the verdict's witnesses lie in the left set
/// and outside the right set.
bool recheck_witness(const Model& m, const LemmaVerdict& v);

struct DegeneracyVerdict {
  bool degenerate = false;
  /// k -> (sum of first-page dimensions on the antidiagonal, total dimension)
  std::map<int, std::pair<int, int>> antidiagonals;
  std::vector<int> failing;
  bool pagewise_agrees = false;  // first page vs stable page, cell by cell
};
DegeneracyVerdict check_degeneracy(const Model& m, Exec exec = Exec::Parallel);

struct BcAeppliVerdict {
  bool equality = false;
  /// k -> (sum of BC+Aeppli dims on the antidiagonal, 2 * total dim)
  std::map<int, std::pair<int, int>> antidiagonals;
  std::vector<int> failing;
};
BcAeppliVerdict check_bc_aeppli_equality(const Model& m, Exec exec = Exec::Parallel);

struct UnimodularVerdict {
  bool unimodular = false;
  std::string delpi_volume;  // printed value of del_pi applied to the volume form
  bool duality_checked = false;
  bool duality_holds = false;
  std::map<int, std::pair<int, int>> duality_dims;  // k -> (H_k, H^(2n-k))
};
UnimodularVerdict check_unimodular(const Model& m, Exec exec = Exec::Parallel);

/// Rank data of one induced map on cohomology.
struct InducedMap {
  std::string name;
  bool well_defined = true;
  bool quasi_iso = true;
  /// (p,q) -> (dom dim, cod dim, rank)
  std::map<std::pair<int, int>, std::tuple<int, int, int>> cells;
};

struct FormalityReport {
  std::vector<InducedMap> maps;  // i1, p1, i2, p2
  bool all_quasi_iso = false;
};
FormalityReport formality_diagram(const Model& m, Exec exec = Exec::Parallel);

/// The six identity-induced comparison maps between BC, Aeppli, the two
/// one-operator cohomologies and the total homology, with ranks; used to test
/// that all of them are isomorphisms when the dpidbar lemma holds.
struct ComparisonMap {
  std::string name;
  int dom = 0, cod = 0, rank = 0;
  bool iso() const { return dom == cod && cod == rank; }
};
std::vector<ComparisonMap> diagram_ranks(const Model& m, Exec exec = Exec::Parallel);

}  // namespace koszul
