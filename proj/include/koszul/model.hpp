#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "koszul/errors.hpp"
#include "koszul/gaussian_rational.hpp"
#include "koszul/sparse.hpp"

namespace koszul {

enum class ModelKind { Free, Tensor };

/// Ascending-tuple order on index bitmasks ({1,4} before {2,3}).
constexpr bool mask_lex_less(uint32_t a, uint32_t b) {
  if (a == b) return false;
  uint32_t d = a ^ b;
  uint32_t low = d & (~d + 1u);
  return (a & low) != 0;
}

/// Parity of merging two ascending index tuples given as bitmasks:
/// (-1)^(number of pairs a in A, b in B with a > b).
inline int merge_mask_sign(uint32_t a, uint32_t b) {
  int inversions = 0;
  while (b) {
    int j = std::countr_zero(b);
    b &= b - 1;
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

/// Basis monomial in sign-normal form: holomorphic legs ascending, then the
/// antiholomorphic part.  For free models `anti` is a bitmask over the anti
/// generators; for tensor models it has exactly one bit, naming a coefficient
/// basis element (the degree-0 unit included).
struct Monomial {
  uint32_t holo = 0;
  uint32_t anti = 0;
  bool operator==(const Monomial&) const = default;
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.holo != b.holo) return mask_lex_less(a.holo, b.holo);
    return mask_lex_less(a.anti, b.anti);
  }
};

/// Sparse linear combination of monomials of one fixed bidegree.
template <typename Tag>
class BasicExpr {
 public:
  BasicExpr() = default;
  BasicExpr(int d1, int d2) : d1_(d1), d2_(d2) {}

  int p() const { return d1_; }
  int q() const { return d2_; }

  const std::map<Monomial, Q, MonomialLess>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  void add(const Monomial& m, const Q& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Q coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Q(0) : it->second;
  }

  BasicExpr& operator+=(const BasicExpr& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  BasicExpr& operator-=(const BasicExpr& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  BasicExpr& operator*=(const Q& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend BasicExpr operator+(BasicExpr a, const BasicExpr& b) { return a += b; }
  friend BasicExpr operator-(BasicExpr a, const BasicExpr& b) { return a -= b; }
  friend BasicExpr operator*(const Q& s, BasicExpr a) { return a *= s; }

  bool operator==(const BasicExpr&) const = default;

 private:
  int d1_ = 0, d2_ = 0;
  std::map<Monomial, Q, MonomialLess> terms_;
};

struct FormKindTag {};
struct PolyKindTag {};
using FormExpr = BasicExpr<FormKindTag>;            // (p,q) differential forms
using PolyvectorExpr = BasicExpr<PolyKindTag>;      // (s,t): s vector legs, t anti legs

struct CoeffElem {
  std::string name;
  int degree = 0;
};

/// Constant bivector pi = sum c_ij X_i ^ X_j over 0-based pairs i < j of
/// holomorphic generator indices (X_i dual to the i-th holomorphic generator).
struct PoissonBivector {
  std::map<std::pair<int, int>, Q> coeff;
  bool is_zero() const { return coeff.empty(); }
  void set(int i, int j, const Q& c);
  bool operator==(const PoissonBivector&) const = default;
};

struct ValidationItem {
  std::string axiom;
  bool pass = false;
  std::string witness;  // offending monomial / value, empty when pass
};

struct ValidationReport {
  std::vector<ValidationItem> items;
  bool ok() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

/// Finite bigraded model of an invariant form algebra, either a free exterior
/// algebra on (1,0)/(0,1) generators or the tensor of a free holomorphic part
/// with an explicit antiholomorphic coefficient complex.
class Model {
 public:
  ModelKind kind = ModelKind::Free;
  std::string name;
  int n = 0;  // complex dimension = number of holomorphic generators

  std::vector<std::string> holo_names;
  std::vector<std::string> anti_names;   // free kind only
  std::vector<CoeffElem> coeff_elems;    // tensor kind only (unit included)

  // Differential rules, index-aligned with the generator lists.  A rule is a
  // FormExpr of the forced bidegree; zero rules are stored as empty exprs.
  std::vector<FormExpr> del_holo, dbar_holo;
  std::vector<FormExpr> del_anti, dbar_anti;
  std::vector<FormExpr> del_coeff, dbar_coeff;

  // Tensor kind: product of coefficient elements, (i,j) -> scalar * elem k.
  // Missing pairs multiply to zero.  finalize() closes the table under the
  // unit and graded commutativity.
  std::map<std::pair<int, int>, std::pair<Q, int>> coeff_products;

  PoissonBivector poisson;

  // ---- derived data ----
  void finalize();
  bool finalized() const { return finalized_; }
  void require_finalized() const;
  void require_validated() const;
  bool validated() const { return validated_; }
  void mark_validated(bool v) { validated_ = v; }

  int anti_gen_count() const;
  int max_anti_degree() const;
  int unit_coeff_index() const { return unit_coeff_; }
  int coeff_degree(int idx) const { return coeff_elems[idx].degree; }
  int anti_degree_of(uint32_t anti_mask) const;

  const std::vector<Monomial>& basis(int p, int q) const;
  int dim(int p, int q) const;
  int basis_index(int p, int q, const Monomial& m) const;  // -1 if absent
  int total_dim() const;

  /// [X_i, X_j] for i < j as (k, coeff) terms, from the holomorphic rules.
  const std::vector<std::pair<int, Q>>& lie_bracket(int i, int j) const;

  /// Wedge of two sign-normal monomials; nullopt when the product vanishes.
  std::optional<std::pair<Monomial, Q>> wedge_monomials(const Monomial& a,
                                                        const Monomial& b) const;

  Monomial one_monomial() const;  // the constant monomial (unit coeff bit for tensor)

  std::string monomial_str(const Monomial& m) const;
  std::string poly_monomial_str(const Monomial& m) const;
  std::string form_str(const FormExpr& f) const;
  std::string poly_str(const PolyvectorExpr& f) const;

  int holo_index(std::string_view name) const;   // -1 if unknown
  int anti_index(std::string_view name) const;
  int coeff_index(std::string_view name) const;

  SparseVector to_vector(const FormExpr& f) const;
  FormExpr from_vector(int p, int q, const SparseVector& v) const;
  SparseVector poly_to_vector(const PolyvectorExpr& f) const;
  PolyvectorExpr poly_from_vector(int s, int t, const SparseVector& v) const;

 private:
  bool finalized_ = false;
  bool validated_ = false;
  int unit_coeff_ = -1;
  std::vector<Monomial> empty_basis_;
  std::map<std::pair<int, int>, std::vector<Monomial>> bases_;
  std::map<std::pair<int, int>, std::unordered_map<uint64_t, int>> index_;
  std::map<std::pair<int, int>, std::vector<std::pair<int, Q>>> lie_;
  std::vector<std::pair<int, Q>> empty_bracket_;
};

/// Parses the line-oriented model file format; returns a finalized but
/// unvalidated model.  Diagnostics carry (line, col).
Model parse_model(std::string_view text);

/// Canonical text form; parse_model(print_model(m)) reproduces m.
std::string print_model(const Model& m);

/// Checks every structural axiom (differentials square to zero and
/// anticommute, the coefficient product is graded-commutative/associative,
/// the bivector is Poisson and compatible with the complex structure, and the
/// contraction identities hold on every basis monomial).  Failures become
/// report entries with a witness; the model is marked validated on success.
ValidationReport validate(Model& m);

/// Replace the Poisson bivector (drops the validated flag).
void set_poisson(Model& m, PoissonBivector pi);

/// Expression parsers shared with the CLI: "1 X1^X2 + -2 X2^X3" etc.
PoissonBivector parse_poisson_expr(const Model& m, std::string_view text);
FormExpr parse_form_expr(const Model& m, std::string_view text, int p, int q);

/// Built-in models: torus_<k>, iwasawa3, iwasawa6, nakamura_case1,
/// nakamura_case2.  All are shipped as canonical model files and validated;
/// the Poisson bivector defaults to zero and is selected separately.
Model builtin(const std::string& name);
std::vector<std::string> builtin_names();
const std::string& builtin_model_text(const std::string& name);

}  // namespace koszul
