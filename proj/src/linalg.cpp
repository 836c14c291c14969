#include "koszul/linalg.hpp"

#include <algorithm>
#include <cassert>

namespace koszul {

SparseVector linear_combine(const Q& a, const SparseVector& x, const Q& b,
                            const SparseVector& y) {
  SparseVector out(std::max(x.dim, y.dim));
  out.terms.reserve(x.terms.size() + y.terms.size());
  auto ix = x.terms.begin(), iy = y.terms.begin();
  while (ix != x.terms.end() || iy != y.terms.end()) {
    if (iy == y.terms.end() || (ix != x.terms.end() && ix->first < iy->first)) {
      Q v = a * ix->second;
      if (!v.is_zero()) out.terms.emplace_back(ix->first, std::move(v));
      ++ix;
    } else if (ix == x.terms.end() || iy->first < ix->first) {
      Q v = b * iy->second;
      if (!v.is_zero()) out.terms.emplace_back(iy->first, std::move(v));
      ++iy;
    } else {
      Q v = a * ix->second + b * iy->second;
      if (!v.is_zero()) out.terms.emplace_back(ix->first, std::move(v));
      ++ix;
      ++iy;
    }
  }
  return out;
}

SparseVector scale(const Q& a, const SparseVector& x) {
  SparseVector out(x.dim);
  if (a.is_zero()) return out;
  out.terms.reserve(x.terms.size());
  for (const auto& [i, v] : x.terms) out.terms.emplace_back(i, a * v);
  return out;
}

std::vector<SparseVector> SparseMatrix::row_vectors() const {
  std::vector<SparseVector> rows(rows_, SparseVector(cols_));
  for (const auto& [rc, v] : entries_) rows[rc.first].terms.emplace_back(rc.second, v);
  return rows;
}

SparseVector SparseMatrix::apply(const SparseVector& x) const {
  if (x.dim != cols_) throw Error("matrix/vector size mismatch");
  std::vector<Q> dense(cols_);
  for (const auto& [i, v] : x.terms) dense[i] = v;
  std::vector<Q> acc(rows_);
  for (const auto& [rc, v] : entries_) {
    const Q& xv = dense[rc.second];
    if (!xv.is_zero()) acc[rc.first] += v * xv;
  }
  SparseVector out(rows_);
  for (int r = 0; r < rows_; ++r)
    if (!acc[r].is_zero()) out.terms.emplace_back(r, std::move(acc[r]));
  return out;
}

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

struct ZI {  // Gaussian integer
  BigInt re, im;
  bool is_zero() const { return re == 0 && im == 0; }
};

BigInt zi_norm(const ZI& a) { return a.re * a.re + a.im * a.im; }

ZI zi_mul(const ZI& a, const ZI& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ZI zi_sub(const ZI& a, const ZI& b) { return {a.re - b.re, a.im - b.im}; }

BigInt round_div(const BigInt& n, const BigInt& d) {
  BigInt q = n / d;  // truncated
  BigInt r = n - q * d;
  if (2 * abs(r) > abs(d)) q += ((r < 0) == (d < 0)) ? 1 : -1;
  return q;
}

// Euclidean gcd in Z[i]; nearest-integer quotient keeps N(rem) <= N(b)/2.
ZI zi_gcd(ZI a, ZI b) {
  while (!b.is_zero()) {
    BigInt nb = zi_norm(b);
    ZI ac = zi_mul(a, {b.re, -b.im});
    ZI q{round_div(ac.re, nb), round_div(ac.im, nb)};
    ZI r = zi_sub(a, zi_mul(q, b));
    a = b;
    b = r;
  }
  return a;
}

// Scale a row to a primitive Z[i] vector with a canonical leading unit:
// the leading entry satisfies re > 0, or re == 0 and im > 0.  This is the
// fraction-free normalization that keeps intermediate entries bounded.
void normalize_primitive(SparseVector& row) {
  if (row.terms.empty()) return;
  BigInt L = 1;
  for (const auto& [i, v] : row.terms) {
    L = lcm(L, denominator(v.re()));
    L = lcm(L, denominator(v.im()));
  }
  if (L != 1) {
    Q scale_q{Rational(L)};
    for (auto& [i, v] : row.terms) v *= scale_q;
  }
  ZI g{0, 0};
  for (const auto& [i, v] : row.terms) {
    g = zi_gcd(g, ZI{numerator(v.re()), numerator(v.im())});
    if (zi_norm(g) == 1) break;
  }
  if (zi_norm(g) != 1) {
    Q ginv = Q(Rational(g.re), Rational(g.im)).inv();
    for (auto& [i, v] : row.terms) v *= ginv;
  }
  const Q& lead = row.terms.front().second;
  Q unit(1);
  if (lead.re() > 0) {
    unit = Q(1);
  } else if (lead.re() < 0) {
    unit = Q(-1);
  } else {
    unit = lead.im() > 0 ? Q(1) : Q(-1);
  }
  if (lead.im() != 0 && lead.re() != 0) {
    // Rotate a genuinely complex leading entry so that re > 0 and im >= 0.
    Q v = lead;
    for (const Q& u : {Q(1), Q::i(), Q(-1), -Q::i()}) {
      Q w = u * v;
      if (w.re() > 0 && w.im() >= 0) {
        unit = u;
        break;
      }
    }
  }
  if (!unit.is_one())
    for (auto& [i, v] : row.terms) v *= unit;
}

struct EchelonForm {
  std::vector<SparseVector> rows;  // pivot-column ascending
  std::vector<int> pivot_cols;
};

// Fraction-free forward elimination with least-index pivot columns.
EchelonForm forward_eliminate(std::vector<SparseVector> work) {
  EchelonForm ef;
  for (auto& r : work) normalize_primitive(r);
  std::erase_if(work, [](const SparseVector& r) { return r.is_zero(); });
  while (!work.empty()) {
    size_t pick = 0;
    for (size_t i = 1; i < work.size(); ++i)
      if (work[i].leading_index() < work[pick].leading_index()) pick = i;
    SparseVector pivot = std::move(work[pick]);
    work.erase(work.begin() + pick);
    int pc = pivot.leading_index();
    const Q& pv = pivot.leading_value();
    for (auto& r : work) {
      Q c = r.at(pc);
      if (c.is_zero()) continue;
      r = linear_combine(pv, r, -c, pivot);
      normalize_primitive(r);
    }
    std::erase_if(work, [](const SparseVector& r) { return r.is_zero(); });
    ef.pivot_cols.push_back(pc);
    ef.rows.push_back(std::move(pivot));
  }
  return ef;
}

// Clear pivot columns upward and normalize leading entries to 1.
void reduce_echelon(EchelonForm& ef) {
  for (size_t i = ef.rows.size(); i-- > 0;) {
    int pc = ef.pivot_cols[i];
    const Q pv = ef.rows[i].leading_value();
    for (size_t j = 0; j < i; ++j) {
      Q c = ef.rows[j].at(pc);
      if (c.is_zero()) continue;
      ef.rows[j] = linear_combine(pv, ef.rows[j], -c, ef.rows[i]);
      normalize_primitive(ef.rows[j]);
    }
  }
  for (auto& r : ef.rows) {
    Q inv = r.leading_value().inv();
    if (!inv.is_one())
      for (auto& [idx, v] : r.terms) v *= inv;
  }
}

EchelonForm rref(std::vector<SparseVector> rows) {
  EchelonForm ef = forward_eliminate(std::move(rows));
  reduce_echelon(ef);
  return ef;
}

}  // namespace

SubspaceBasis SubspaceBasis::from_vectors(int ambient_dim,
                                          const std::vector<SparseVector>& vectors) {
  std::vector<SparseVector> rows;
  rows.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.dim != ambient_dim) throw AmbientMismatch("vector dimension mismatch");
    rows.push_back(v);
  }
  EchelonForm ef = rref(std::move(rows));
  SubspaceBasis out(ambient_dim);
  out.rows_ = std::move(ef.rows);
  out.pivots_ = std::move(ef.pivot_cols);
  return out;
}

SubspaceBasis SubspaceBasis::full(int ambient_dim) {
  std::vector<SparseVector> rows;
  rows.reserve(ambient_dim);
  for (int i = 0; i < ambient_dim; ++i) {
    SparseVector e(ambient_dim);
    e.terms.emplace_back(i, Q(1));
    rows.push_back(std::move(e));
  }
  return from_vectors(ambient_dim, rows);
}

SparseVector SubspaceBasis::reduce(SparseVector v) const {
  if (v.dim != ambient_) throw AmbientMismatch("vector dimension mismatch");
  for (size_t i = 0; i < rows_.size(); ++i) {
    Q c = v.at(pivots_[i]);
    if (!c.is_zero()) v = linear_combine(Q(1), v, -c, rows_[i]);
  }
  return v;
}

bool SubspaceBasis::contains(const SubspaceBasis& other) const {
  if (other.ambient_ != ambient_) throw AmbientMismatch("ambient dimension mismatch");
  for (const auto& r : other.rows_)
    if (!contains(r)) return false;
  return true;
}

std::vector<SparseVector> SubspaceBasis::complement_of(const SubspaceBasis& sub) const {
  if (sub.ambient_ != ambient_) throw AmbientMismatch("ambient dimension mismatch");
  std::vector<SparseVector> out;
  std::vector<SparseVector> extra;  // residuals, kept leading-1, unordered
  for (const auto& row : rows_) {
    SparseVector v = sub.reduce(row);
    for (const auto& e : extra) {
      Q c = v.at(e.leading_index());
      if (!c.is_zero()) v = linear_combine(Q(1), v, -c, e);
    }
    if (v.is_zero()) continue;
    Q inv = v.leading_value().inv();
    if (!inv.is_one())
      for (auto& [idx, val] : v.terms) val *= inv;
    extra.push_back(std::move(v));
    out.push_back(row);
  }
  return out;
}

int rank(const SparseMatrix& m) {
  return static_cast<int>(forward_eliminate(m.row_vectors()).rows.size());
}

SubspaceBasis kernel_basis(const SparseMatrix& m) {
  EchelonForm ef = rref(m.row_vectors());
  std::vector<bool> is_pivot(m.cols(), false);
  for (int pc : ef.pivot_cols) is_pivot[pc] = true;
  std::vector<SparseVector> gens;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    SparseVector v(m.cols());
    for (size_t i = 0; i < ef.rows.size(); ++i) {
      Q c = ef.rows[i].at(f);
      if (!c.is_zero()) v.set(ef.pivot_cols[i], -c);
    }
    v.set(f, Q(1));
    gens.push_back(std::move(v));
  }
  return SubspaceBasis::from_vectors(m.cols(), gens);
}

SubspaceBasis image_basis(const SparseMatrix& m) {
  std::vector<SparseVector> cols(m.cols(), SparseVector(m.rows()));
  for (const auto& [rc, v] : m.entries()) cols[rc.second].terms.emplace_back(rc.first, v);
  return SubspaceBasis::from_vectors(m.rows(), cols);
}

std::optional<SparseVector> solve(const SparseMatrix& m, const SparseVector& b) {
  if (b.dim != m.rows()) throw Error("solve: rhs length must equal rows");
  const int aug = m.cols();
  std::vector<SparseVector> rows = m.row_vectors();
  for (auto& r : rows) r.dim = aug + 1;
  for (const auto& [i, v] : b.terms) rows[i].terms.emplace_back(aug, v);
  EchelonForm ef = rref(std::move(rows));
  SparseVector x(m.cols());
  for (size_t i = 0; i < ef.rows.size(); ++i) {
    if (ef.pivot_cols[i] == aug) return std::nullopt;  // inconsistent row
    Q v = ef.rows[i].at(aug);
    if (!v.is_zero()) x.terms.emplace_back(ef.pivot_cols[i], std::move(v));
  }
  std::sort(x.terms.begin(), x.terms.end(),
            [](const auto& a, const auto& b2) { return a.first < b2.first; });
  return x;
}

int quotient_dim(const SubspaceBasis& numerator, const SubspaceBasis& denominator) {
  if (numerator.ambient_dim() != denominator.ambient_dim())
    throw AmbientMismatch("quotient: ambient dimension mismatch");
  if (!numerator.contains(denominator))
    throw NotASubspace("quotient: denominator is not contained in numerator");
  return numerator.dim() - denominator.dim();
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw AmbientMismatch("intersect: ambient dimension mismatch");
  const int n = a.ambient_dim();
  const int ra = a.dim(), rb = b.dim();
  SparseMatrix m(n, ra + rb);
  for (int j = 0; j < ra; ++j)
    for (const auto& [i, v] : a.vectors()[j].terms) m.add(i, j, v);
  for (int j = 0; j < rb; ++j)
    for (const auto& [i, v] : b.vectors()[j].terms) m.add(i, ra + j, v);
  SubspaceBasis ker = kernel_basis(m);
  std::vector<SparseVector> gens;
  for (const auto& k : ker.vectors()) {
    SparseVector x(n);
    for (const auto& [j, lam] : k.terms) {
      if (j >= ra) break;
      x = linear_combine(Q(1), x, lam, a.vectors()[j]);
    }
    if (!x.is_zero()) gens.push_back(std::move(x));
  }
  return SubspaceBasis::from_vectors(n, gens);
}

SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw AmbientMismatch("sum: ambient dimension mismatch");
  std::vector<SparseVector> rows = a.vectors();
  rows.insert(rows.end(), b.vectors().begin(), b.vectors().end());
  return SubspaceBasis::from_vectors(a.ambient_dim(), rows);
}

SubspaceBasis image_of_subspace(const SparseMatrix& m, const SubspaceBasis& space) {
  if (space.ambient_dim() != m.cols())
    throw AmbientMismatch("image_of_subspace: ambient dimension mismatch");
  std::vector<SparseVector> images;
  images.reserve(space.dim());
  for (const auto& v : space.vectors()) images.push_back(m.apply(v));
  return SubspaceBasis::from_vectors(m.rows(), images);
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw Error("multiply: inner dimensions differ");
  std::vector<SparseVector> bcols(b.cols(), SparseVector(b.rows()));
  for (const auto& [rc, v] : b.entries()) bcols[rc.second].terms.emplace_back(rc.first, v);
  SparseMatrix out(a.rows(), b.cols());
  for (int c = 0; c < b.cols(); ++c) {
    if (bcols[c].is_zero()) continue;
    SparseVector col = a.apply(bcols[c]);
    for (const auto& [r, v] : col.terms) out.add(r, c, v);
  }
  return out;
}

}  // namespace koszul
