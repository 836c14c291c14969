#include "koszul/model.hpp"

#include <algorithm>
#include <sstream>

#include "koszul/operators.hpp"

namespace koszul {

namespace {

uint64_t mono_key(const Monomial& m) {
  return (static_cast<uint64_t>(m.holo) << 32) | m.anti;
}

std::vector<uint32_t> masks_of_weight(int n, int w) {
  std::vector<uint32_t> out;
  if (w < 0 || w > n) return out;
  // lexicographic on ascending index tuples
  std::vector<int> idx(w);
  for (int i = 0; i < w; ++i) idx[i] = i;
  while (true) {
    uint32_t m = 0;
    for (int i : idx) m |= 1u << i;
    out.push_back(m);
    int t = w - 1;
    while (t >= 0 && idx[t] == n - w + t) --t;
    if (t < 0) break;
    ++idx[t];
    for (int s = t + 1; s < w; ++s) idx[s] = idx[s - 1] + 1;
  }
  if (w == 0) out = {0u};
  std::sort(out.begin(), out.end(), mask_lex_less);
  return out;
}

}  // namespace

void PoissonBivector::set(int i, int j, const Q& c) {
  if (i == j) return;
  int a = std::min(i, j), b = std::max(i, j);
  Q v = (i < j) ? c : -c;
  auto key = std::make_pair(a, b);
  auto it = coeff.find(key);
  if (it == coeff.end()) {
    if (!v.is_zero()) coeff.emplace(key, v);
  } else {
    it->second += v;
    if (it->second.is_zero()) coeff.erase(it);
  }
}

int Model::anti_gen_count() const {
  return kind == ModelKind::Free ? static_cast<int>(anti_names.size())
                                 : static_cast<int>(coeff_elems.size());
}

int Model::max_anti_degree() const {
  if (kind == ModelKind::Free) return static_cast<int>(anti_names.size());
  int mx = 0;
  for (const auto& e : coeff_elems) mx = std::max(mx, e.degree);
  return mx;
}

int Model::anti_degree_of(uint32_t anti_mask) const {
  if (kind == ModelKind::Free) return std::popcount(anti_mask);
  if (anti_mask == 0) return 0;
  return coeff_elems[std::countr_zero(anti_mask)].degree;
}

Monomial Model::one_monomial() const {
  Monomial m;
  if (kind == ModelKind::Tensor) m.anti = 1u << unit_coeff_;
  return m;
}

void Model::require_finalized() const {
  if (!finalized_) throw Error("model not finalized");
}

void Model::require_validated() const {
  if (!validated_) throw Error("model '" + name + "' has not been validated");
}

void Model::finalize() {
  if (static_cast<int>(holo_names.size()) != n)
    throw Error("model '" + name + "': holomorphic generator count must equal dim");
  del_holo.resize(n, FormExpr(2, 0));
  dbar_holo.resize(n, FormExpr(1, 1));
  if (kind == ModelKind::Free) {
    del_anti.resize(anti_names.size(), FormExpr(1, 1));
    dbar_anti.resize(anti_names.size(), FormExpr(0, 2));
  } else {
    del_coeff.resize(coeff_elems.size());
    dbar_coeff.resize(coeff_elems.size());
    unit_coeff_ = -1;
    for (size_t k = 0; k < coeff_elems.size(); ++k) {
      if (coeff_elems[k].degree == 0) {
        if (unit_coeff_ >= 0)
          throw Error("tensor model needs exactly one degree-0 coefficient element");
        unit_coeff_ = static_cast<int>(k);
      }
    }
    if (unit_coeff_ < 0)
      throw Error("tensor model needs exactly one degree-0 coefficient element");
    // Close the product table: unit action and graded commutativity.
    const int ne = static_cast<int>(coeff_elems.size());
    std::map<std::pair<int, int>, std::pair<Q, int>> closed = coeff_products;
    for (int k = 0; k < ne; ++k) {
      closed[{unit_coeff_, k}] = {Q(1), k};
      closed[{k, unit_coeff_}] = {Q(1), k};
    }
    for (const auto& [ij, val] : coeff_products) {
      auto sym = std::make_pair(ij.second, ij.first);
      if (!closed.count(sym)) {
        int sg = (coeff_elems[ij.first].degree * coeff_elems[ij.second].degree) & 1
                     ? -1
                     : 1;
        closed[sym] = {Q(sg) * val.first, val.second};
      }
    }
    coeff_products = std::move(closed);
  }

  // Canonical ordered bases per bidegree.
  bases_.clear();
  index_.clear();
  const int maxq = max_anti_degree();
  for (int p = 0; p <= n; ++p) {
    auto holo_masks = masks_of_weight(n, p);
    for (int q = 0; q <= maxq; ++q) {
      std::vector<Monomial> basis;
      if (kind == ModelKind::Free) {
        auto anti_masks = masks_of_weight(anti_gen_count(), q);
        for (uint32_t h : holo_masks)
          for (uint32_t a : anti_masks) basis.push_back({h, a});
      } else {
        for (uint32_t h : holo_masks)
          for (size_t k = 0; k < coeff_elems.size(); ++k)
            if (coeff_elems[k].degree == q)
              basis.push_back({h, 1u << static_cast<uint32_t>(k)});
      }
      auto key = std::make_pair(p, q);
      auto& idx = index_[key];
      for (size_t i = 0; i < basis.size(); ++i)
        idx[mono_key(basis[i])] = static_cast<int>(i);
      bases_[key] = std::move(basis);
    }
  }

  // Lie brackets of the dual frame from the holomorphic structure equations:
  // coefficient c of w_i^w_j in del(w_k) contributes -c X_k to [X_i, X_j].
  lie_.clear();
  for (int k = 0; k < n; ++k) {
    for (const auto& [m, c] : del_holo[k].terms()) {
      uint32_t h = m.holo;
      int i = std::countr_zero(h);
      h &= h - 1;
      int j = std::countr_zero(h);
      lie_[{std::min(i, j), std::max(i, j)}].emplace_back(k, -c);
    }
  }
  finalized_ = true;
  validated_ = false;
}

const std::vector<Monomial>& Model::basis(int p, int q) const {
  require_finalized();
  auto it = bases_.find({p, q});
  return it == bases_.end() ? empty_basis_ : it->second;
}

int Model::dim(int p, int q) const { return static_cast<int>(basis(p, q).size()); }

int Model::total_dim() const {
  int d = 0;
  for (const auto& [pq, b] : bases_) d += static_cast<int>(b.size());
  return d;
}

int Model::basis_index(int p, int q, const Monomial& m) const {
  require_finalized();
  auto it = index_.find({p, q});
  if (it == index_.end()) return -1;
  auto jt = it->second.find(mono_key(m));
  return jt == it->second.end() ? -1 : jt->second;
}

const std::vector<std::pair<int, Q>>& Model::lie_bracket(int i, int j) const {
  require_finalized();
  auto it = lie_.find({i, j});
  return it == lie_.end() ? empty_bracket_ : it->second;
}

std::optional<std::pair<Monomial, Q>> Model::wedge_monomials(const Monomial& a,
                                                             const Monomial& b) const {
  if (a.holo & b.holo) return std::nullopt;
  Q sign(merge_mask_sign(a.holo, b.holo));
  // Move b's holomorphic legs across a's antiholomorphic part.
  if ((anti_degree_of(a.anti) * std::popcount(b.holo)) & 1) sign = -sign;
  Monomial out;
  out.holo = a.holo | b.holo;
  if (kind == ModelKind::Free) {
    if (a.anti & b.anti) return std::nullopt;
    if (merge_mask_sign(a.anti, b.anti) < 0) sign = -sign;
    out.anti = a.anti | b.anti;
  } else {
    int ia = std::countr_zero(a.anti);
    int jb = std::countr_zero(b.anti);
    auto it = coeff_products.find({ia, jb});
    if (it == coeff_products.end() || it->second.first.is_zero()) return std::nullopt;
    sign *= it->second.first;
    out.anti = 1u << static_cast<uint32_t>(it->second.second);
  }
  return std::make_pair(out, sign);
}

int Model::holo_index(std::string_view name_) const {
  for (size_t i = 0; i < holo_names.size(); ++i)
    if (holo_names[i] == name_) return static_cast<int>(i);
  return -1;
}
int Model::anti_index(std::string_view name_) const {
  for (size_t i = 0; i < anti_names.size(); ++i)
    if (anti_names[i] == name_) return static_cast<int>(i);
  return -1;
}
int Model::coeff_index(std::string_view name_) const {
  for (size_t i = 0; i < coeff_elems.size(); ++i)
    if (coeff_elems[i].name == name_) return static_cast<int>(i);
  return -1;
}

std::string Model::monomial_str(const Monomial& m) const {
  std::vector<std::string> parts;
  uint32_t h = m.holo;
  while (h) {
    int i = std::countr_zero(h);
    h &= h - 1;
    parts.push_back(holo_names[i]);
  }
  if (kind == ModelKind::Free) {
    uint32_t a = m.anti;
    while (a) {
      int i = std::countr_zero(a);
      a &= a - 1;
      parts.push_back(anti_names[i]);
    }
  } else if (m.anti) {
    int i = std::countr_zero(m.anti);
    if (i != unit_coeff_) parts.push_back(coeff_elems[i].name);
  }
  if (parts.empty()) return "1";
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "^" + parts[i];
  return out;
}

std::string Model::poly_monomial_str(const Monomial& m) const {
  std::vector<std::string> parts;
  uint32_t h = m.holo;
  while (h) {
    int i = std::countr_zero(h);
    h &= h - 1;
    parts.push_back("X" + std::to_string(i + 1));
  }
  if (kind == ModelKind::Free) {
    uint32_t a = m.anti;
    while (a) {
      int i = std::countr_zero(a);
      a &= a - 1;
      parts.push_back(anti_names[i]);
    }
  } else if (m.anti) {
    int i = std::countr_zero(m.anti);
    if (i != unit_coeff_) parts.push_back(coeff_elems[i].name);
  }
  if (parts.empty()) return "1";
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "^" + parts[i];
  return out;
}

namespace {
template <typename Expr, typename NameFn>
std::string expr_str(const Expr& f, NameFn&& mono_name) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    if (!first) out += " + ";
    first = false;
    out += c.str() + " " + mono_name(m);
  }
  return out;
}
}  // namespace

std::string Model::form_str(const FormExpr& f) const {
  return expr_str(f, [&](const Monomial& m) { return monomial_str(m); });
}

std::string Model::poly_str(const PolyvectorExpr& f) const {
  return expr_str(f, [&](const Monomial& m) { return poly_monomial_str(m); });
}

SparseVector Model::to_vector(const FormExpr& f) const {
  SparseVector v(dim(f.p(), f.q()));
  for (const auto& [m, c] : f.terms()) {
    int i = basis_index(f.p(), f.q(), m);
    if (i < 0) throw Error("form term outside the model basis");
    v.set(i, c);
  }
  return v;
}

FormExpr Model::from_vector(int p, int q, const SparseVector& v) const {
  const auto& b = basis(p, q);
  if (v.dim != static_cast<int>(b.size())) throw AmbientMismatch("from_vector size");
  FormExpr f(p, q);
  for (const auto& [i, c] : v.terms) f.add(b[i], c);
  return f;
}

SparseVector Model::poly_to_vector(const PolyvectorExpr& f) const {
  SparseVector v(dim(f.p(), f.q()));
  for (const auto& [m, c] : f.terms()) {
    int i = basis_index(f.p(), f.q(), m);
    if (i < 0) throw Error("polyvector term outside the model basis");
    v.set(i, c);
  }
  return v;
}

PolyvectorExpr Model::poly_from_vector(int s, int t, const SparseVector& v) const {
  const auto& b = basis(s, t);
  if (v.dim != static_cast<int>(b.size())) throw AmbientMismatch("poly_from_vector size");
  PolyvectorExpr f(s, t);
  for (const auto& [i, c] : v.terms) f.add(b[i], c);
  return f;
}

void set_poisson(Model& m, PoissonBivector pi) {
  for (const auto& [ij, c] : pi.coeff)
    if (ij.first < 0 || ij.second >= m.n)
      throw Error("Poisson coefficient index out of range");
  m.poisson = std::move(pi);
  m.mark_validated(false);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

template <typename OpFn>
void check_on_basis(const Model& m, ValidationReport& rep, const std::string& axiom,
                    OpFn&& op) {
  for (int p = 0; p <= m.n; ++p) {
    for (int q = 0; q <= m.max_anti_degree(); ++q) {
      for (const Monomial& mono : m.basis(p, q)) {
        FormExpr f(p, q);
        f.add(mono, Q(1));
        if (!op(f).is_zero()) {
          rep.items.push_back({axiom, false, m.monomial_str(mono)});
          return;
        }
      }
    }
  }
  rep.items.push_back({axiom, true, ""});
}

}  // namespace

ValidationReport validate(Model& m) {
  m.require_finalized();
  ValidationReport rep;

  if (m.kind == ModelKind::Tensor) {
    // Coefficient algebra sanity: degree additivity, graded commutativity,
    // associativity on the finite table.
    const int ne = static_cast<int>(m.coeff_elems.size());
    bool deg_ok = true, comm_ok = true, assoc_ok = true;
    std::string deg_w, comm_w, assoc_w;
    auto prod = [&](int i, int j) -> std::pair<Q, int> {
      auto it = m.coeff_products.find({i, j});
      if (it == m.coeff_products.end()) return {Q(0), -1};
      return it->second;
    };
    for (int i = 0; i < ne && deg_ok; ++i)
      for (int j = 0; j < ne && deg_ok; ++j) {
        auto [c, k] = prod(i, j);
        if (!c.is_zero() &&
            m.coeff_elems[k].degree != m.coeff_elems[i].degree + m.coeff_elems[j].degree) {
          deg_ok = false;
          deg_w = m.coeff_elems[i].name + "*" + m.coeff_elems[j].name;
        }
      }
    for (int i = 0; i < ne && comm_ok; ++i)
      for (int j = 0; j < ne && comm_ok; ++j) {
        auto [c1, k1] = prod(i, j);
        auto [c2, k2] = prod(j, i);
        int sg = (m.coeff_elems[i].degree * m.coeff_elems[j].degree) & 1 ? -1 : 1;
        bool same = c1.is_zero() ? c2.is_zero() : (k1 == k2 && c1 == Q(sg) * c2);
        if (!same) {
          comm_ok = false;
          comm_w = m.coeff_elems[i].name + "*" + m.coeff_elems[j].name;
        }
      }
    for (int i = 0; i < ne && assoc_ok; ++i)
      for (int j = 0; j < ne && assoc_ok; ++j)
        for (int k = 0; k < ne && assoc_ok; ++k) {
          auto [c1, ij] = prod(i, j);
          std::pair<Q, int> left{Q(0), -1};
          if (!c1.is_zero()) {
            auto [c2, ijk] = prod(ij, k);
            left = {c1 * c2, ijk};
          }
          auto [c3, jk] = prod(j, k);
          std::pair<Q, int> right{Q(0), -1};
          if (!c3.is_zero()) {
            auto [c4, ijk] = prod(i, jk);
            right = {c3 * c4, ijk};
          }
          bool same = left.first.is_zero() ? right.first.is_zero()
                                           : (!right.first.is_zero() &&
                                              left.second == right.second &&
                                              left.first == right.first);
          if (!same) {
            assoc_ok = false;
            assoc_w = m.coeff_elems[i].name + "*" + m.coeff_elems[j].name + "*" +
                      m.coeff_elems[k].name;
          }
        }
    rep.items.push_back({"coefficient product degree-additive", deg_ok, deg_w});
    rep.items.push_back({"coefficient product graded-commutative", comm_ok, comm_w});
    rep.items.push_back({"coefficient product associative", assoc_ok, assoc_w});
  }

  auto del = [&](const FormExpr& f) { return apply(m, Op::Del, f); };
  auto dbar = [&](const FormExpr& f) { return apply(m, Op::Dbar, f); };
  auto delpi = [&](const FormExpr& f) { return apply(m, Op::DelPi, f); };
  auto iota = [&](const FormExpr& f) { return apply(m, Op::IotaPi, f); };

  check_on_basis(m, rep, "del^2 = 0",
                 [&](const FormExpr& f) { return del(del(f)); });
  check_on_basis(m, rep, "dbar^2 = 0",
                 [&](const FormExpr& f) { return dbar(dbar(f)); });
  check_on_basis(m, rep, "del dbar + dbar del = 0",
                 [&](const FormExpr& f) { return del(dbar(f)) + dbar(del(f)); });

  // Bivector conditions.
  {
    PolyvectorExpr pi = poisson_polyvector(m);
    PolyvectorExpr sch = schouten(m, pi, pi);
    rep.items.push_back({"[pi,pi] = 0", sch.is_zero(), sch.is_zero() ? "" : m.poly_str(sch)});
  }
  check_on_basis(m, rep, "dbar iota - iota dbar = 0",
                 [&](const FormExpr& f) { return dbar(iota(f)) - iota(dbar(f)); });
  check_on_basis(m, rep, "dbar delpi + delpi dbar = 0",
                 [&](const FormExpr& f) { return dbar(delpi(f)) + delpi(dbar(f)); });
  check_on_basis(m, rep, "del delpi + delpi del = 0",
                 [&](const FormExpr& f) { return del(delpi(f)) + delpi(del(f)); });
  check_on_basis(m, rep, "delpi iota - iota delpi = 0",
                 [&](const FormExpr& f) { return delpi(iota(f)) - iota(delpi(f)); });
  check_on_basis(m, rep, "delpi^2 = 0",
                 [&](const FormExpr& f) { return delpi(delpi(f)); });

  m.mark_validated(rep.ok());
  return rep;
}

}  // namespace koszul
