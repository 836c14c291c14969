#include "koszul/cohomology.hpp"

#include <algorithm>
#include <exception>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace koszul {

std::string table_kind_name(TableKind k) {
  switch (k) {
    case TableKind::Dolbeault: return "dolbeault";
    case TableKind::DelPi: return "delpi";
    case TableKind::KB: return "kb";
    case TableKind::BC: return "bott-chern";
    case TableKind::Aeppli: return "aeppli";
    case TableKind::LP: return "lichnerowicz-poisson";
    case TableKind::SSPage: return "ss-page";
  }
  return "?";
}

namespace {

// Run fn(0..count-1), optionally on the OpenMP pool.  Results must be written
// to index-addressed slots so the assembly order never matters.
template <typename Fn>
void parallel_for(Exec exec, int count, Fn&& fn) {
  if (exec == Exec::Parallel) {
#ifdef _OPENMP
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
#endif
  }
  for (int i = 0; i < count; ++i) fn(i);
}

std::vector<std::pair<int, int>> all_bidegrees(const Model& m) {
  std::vector<std::pair<int, int>> out;
  for (int p = 0; p <= m.n; ++p)
    for (int q = 0; q <= m.max_anti_degree(); ++q) out.emplace_back(p, q);
  return out;
}

}  // namespace

int total_degree(const Model& m, TotalGrading g, int p, int q) {
  return g == TotalGrading::KB ? m.n - p + q : p + q;
}

int max_total_degree(const Model& m, TotalGrading g) {
  (void)g;
  return m.n + m.max_anti_degree();
}

TotalSlice total_slice(const Model& m, TotalGrading g, int k) {
  TotalSlice s;
  s.k = k;
  for (int p = 0; p <= m.n; ++p) {
    for (int q = 0; q <= m.max_anti_degree(); ++q) {
      if (total_degree(m, g, p, q) != k) continue;
      if (m.dim(p, q) == 0) continue;
      s.blocks.emplace_back(p, q);
      s.offsets.push_back(s.dim);
      s.dim += m.dim(p, q);
    }
  }
  return s;
}

SparseMatrix total_differential(const Model& m, TotalGrading g, int k) {
  TotalSlice src = total_slice(m, g, k);
  TotalSlice dst = total_slice(m, g, k + 1);
  SparseMatrix out(dst.dim, src.dim);
  const bool poly = g == TotalGrading::LP;
  struct Leg {
    Op op;
    int dp, dq;
  };
  std::vector<Leg> legs;
  if (g == TotalGrading::KB)
    legs = {{Op::DelPi, -1, 0}, {Op::Dbar, 0, +1}};
  else if (g == TotalGrading::DeRham)
    legs = {{Op::Del, +1, 0}, {Op::Dbar, 0, +1}};
  else
    legs = {{Op::BPi, +1, 0}, {Op::Dbar, 0, +1}};
  for (size_t b = 0; b < src.blocks.size(); ++b) {
    auto [p, q] = src.blocks[b];
    const int col0 = src.offsets[b];
    const auto& basis = m.basis(p, q);
    for (const Leg& leg : legs) {
      int tp = p + leg.dp, tq = q + leg.dq;
      int row0 = dst.offset(tp, tq);
      if (row0 < 0) continue;
      for (size_t j = 0; j < basis.size(); ++j) {
        if (poly) {
          PolyvectorExpr f(p, q);
          f.add(basis[j], Q(1));
          PolyvectorExpr img = apply_poly(m, leg.op, f);
          for (const auto& [mono, c] : img.terms())
            out.add(row0 + m.basis_index(tp, tq, mono), col0 + static_cast<int>(j), c);
        } else {
          FormExpr f(p, q);
          f.add(basis[j], Q(1));
          FormExpr img = apply(m, leg.op, f);
          for (const auto& [mono, c] : img.terms())
            out.add(row0 + m.basis_index(tp, tq, mono), col0 + static_cast<int>(j), c);
        }
      }
    }
  }
  return out;
}

SparseVector embed_in_slice(const TotalSlice& s, int p, int q, const SparseVector& v) {
  int off = s.offset(p, q);
  if (off < 0) throw AmbientMismatch("bidegree not in slice");
  SparseVector out(s.dim);
  for (const auto& [i, c] : v.terms) out.terms.emplace_back(off + i, c);
  return out;
}

SubspaceBasis block_coordinates(const TotalSlice& s, int p, int q) {
  int bi = s.block_index(p, q);
  if (bi < 0) return SubspaceBasis(s.dim);
  int off = s.offsets[bi];
  int end = (bi + 1 < static_cast<int>(s.offsets.size())) ? s.offsets[bi + 1] : s.dim;
  std::vector<SparseVector> rows;
  for (int i = off; i < end; ++i) {
    SparseVector e(s.dim);
    e.terms.emplace_back(i, Q(1));
    rows.push_back(std::move(e));
  }
  return SubspaceBasis::from_vectors(s.dim, rows);
}

SparseVector restrict_to_block(const TotalSlice& s, int p, int q,
                               const SparseVector& v) {
  int bi = s.block_index(p, q);
  if (bi < 0) throw AmbientMismatch("bidegree not in slice");
  int off = s.offsets[bi];
  int end = (bi + 1 < static_cast<int>(s.offsets.size())) ? s.offsets[bi + 1] : s.dim;
  SparseVector out(end - off);
  for (const auto& [i, c] : v.terms) {
    if (i < off || i >= end)
      throw AmbientMismatch("vector not supported on the requested block");
    out.terms.emplace_back(i - off, c);
  }
  return out;
}

std::string slice_vector_str(const Model& m, const TotalSlice& s, const SparseVector& v,
                             bool poly) {
  if (v.is_zero()) return "0";
  std::string out;
  for (const auto& [i, c] : v.terms) {
    size_t b = 0;
    while (b + 1 < s.offsets.size() && s.offsets[b + 1] <= i) ++b;
    auto [p, q] = s.blocks[b];
    const Monomial& mono = m.basis(p, q)[i - s.offsets[b]];
    if (!out.empty()) out += " + ";
    out += c.str() + " " + (poly ? m.poly_monomial_str(mono) : m.monomial_str(mono));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// ker/im table of a single homogeneous operator acting along its shift.
CohomologyTable single_operator_table(const Model& m, TableKind kind, Op op, Exec exec,
                                      bool reps, bool poly) {
  m.require_validated();
  auto cells = all_bidegrees(m);
  std::vector<int> ranks(cells.size(), 0);
  auto [dp, dq] = op_shift(op);
  parallel_for(exec, static_cast<int>(cells.size()), [&](int i) {
    auto [p, q] = cells[i];
    if (m.dim(p, q) == 0) return;
    SparseMatrix mat = poly ? poly_op_matrix(m, op, p, q) : op_matrix(m, op, p, q);
    ranks[i] = rank(mat);
  });
  std::map<std::pair<int, int>, int> rank_at;
  for (size_t i = 0; i < cells.size(); ++i) rank_at[cells[i]] = ranks[i];

  CohomologyTable t;
  t.kind = kind;
  for (auto [p, q] : cells) {
    int d = m.dim(p, q);
    auto it_in = rank_at.find({p - dp, q - dq});
    int rin = it_in == rank_at.end() ? 0 : it_in->second;
    t.bigraded[{p, q}] = d - rank_at[{p, q}] - rin;
  }
  if (reps) {
    for (auto [p, q] : cells) {
      if (t.bigraded[{p, q}] == 0) continue;
      SparseMatrix out_mat = poly ? poly_op_matrix(m, op, p, q) : op_matrix(m, op, p, q);
      SubspaceBasis ker = kernel_basis(out_mat);
      SubspaceBasis img(m.dim(p, q));
      if (m.dim(p - dp, q - dq) > 0) {
        SparseMatrix in_mat = poly ? poly_op_matrix(m, op, p - dp, q - dq)
                                   : op_matrix(m, op, p - dp, q - dq);
        img = image_basis(in_mat);
      }
      std::vector<std::string> rs;
      for (const auto& v : ker.complement_of(img))
        rs.push_back(poly ? m.poly_str(m.poly_from_vector(p, q, v))
                          : m.form_str(m.from_vector(p, q, v)));
      t.bigraded_reps[{p, q}] = std::move(rs);
    }
  }
  return t;
}

CohomologyTable total_complex_table(const Model& m, TableKind kind, TotalGrading g,
                                    Exec exec, bool reps) {
  m.require_validated();
  const int kmax = max_total_degree(m, g);
  std::vector<int> ranks(kmax + 1, 0);
  std::vector<int> dims(kmax + 1, 0);
  parallel_for(exec, kmax + 1, [&](int k) {
    TotalSlice s = total_slice(m, g, k);
    dims[k] = s.dim;
    ranks[k] = rank(total_differential(m, g, k));
  });
  CohomologyTable t;
  t.kind = kind;
  for (int k = 0; k <= kmax; ++k)
    t.graded[k] = dims[k] - ranks[k] - (k > 0 ? ranks[k - 1] : 0);
  if (reps) {
    for (int k = 0; k <= kmax; ++k) {
      if (t.graded[k] == 0) continue;
      TotalSlice s = total_slice(m, g, k);
      SubspaceBasis ker = kernel_basis(total_differential(m, g, k));
      SubspaceBasis img =
          k > 0 ? image_basis(total_differential(m, g, k - 1)) : SubspaceBasis(s.dim);
      std::vector<std::string> rs;
      for (const auto& v : ker.complement_of(img))
        rs.push_back(slice_vector_str(m, s, v, g == TotalGrading::LP));
      t.graded_reps[k] = std::move(rs);
    }
  }
  return t;
}

}  // namespace

CohomologyTable dolbeault(const Model& m, Exec exec, bool reps) {
  return single_operator_table(m, TableKind::Dolbeault, Op::Dbar, exec, reps, false);
}

CohomologyTable delpi_cohomology(const Model& m, Exec exec, bool reps) {
  return single_operator_table(m, TableKind::DelPi, Op::DelPi, exec, reps, false);
}

CohomologyTable kb_homology(const Model& m, Exec exec, bool reps) {
  CohomologyTable t = total_complex_table(m, TableKind::KB, TotalGrading::KB, exec, reps);
  // Dimensions are expected to pair up around the middle degree; a violation
  // means either a bug or a model outside the duality theorem's hypotheses,
  // so it is flagged rather than silently accepted.
  const int kmax = max_total_degree(m, TotalGrading::KB);
  for (int k = 0; 2 * k <= kmax; ++k) {
    if (t.at(k) != t.at(kmax - k))
      t.notes.push_back("duality violated: dim H_" + std::to_string(k) + " = " +
                        std::to_string(t.at(k)) + " but dim H_" +
                        std::to_string(kmax - k) + " = " +
                        std::to_string(t.at(kmax - k)));
  }
  return t;
}

CohomologyTable lp_cohomology(const Model& m, Exec exec, bool reps) {
  return total_complex_table(m, TableKind::LP, TotalGrading::LP, exec, reps);
}

namespace {

struct BCCell {
  int dim = 0;
  std::vector<std::string> reps;
};

BCCell bott_chern_cell(const Model& m, int p, int q, bool reps) {
  BCCell cell;
  const int d = m.dim(p, q);
  if (d == 0) return cell;
  SubspaceBasis ker_pi = kernel_basis(op_matrix(m, Op::DelPi, p, q));
  SubspaceBasis ker_db = kernel_basis(op_matrix(m, Op::Dbar, p, q));
  SubspaceBasis num = intersect(ker_pi, ker_db);
  SubspaceBasis den(d);
  if (m.dim(p + 1, q - 1) > 0) {
    SubspaceBasis mid = image_basis(op_matrix(m, Op::Dbar, p + 1, q - 1));
    den = image_of_subspace(op_matrix(m, Op::DelPi, p + 1, q), mid);
  }
  cell.dim = quotient_dim(num, den);
  if (reps)
    for (const auto& v : num.complement_of(den))
      cell.reps.push_back(m.form_str(m.from_vector(p, q, v)));
  return cell;
}

BCCell aeppli_cell(const Model& m, int p, int q, bool reps) {
  BCCell cell;
  const int d = m.dim(p, q);
  if (d == 0) return cell;
  SparseMatrix dbar_pq = op_matrix(m, Op::Dbar, p, q);
  SparseMatrix delpi_up = op_matrix(m, Op::DelPi, p, q + 1);
  SubspaceBasis num = kernel_basis(multiply(delpi_up, dbar_pq));
  SubspaceBasis den(d);
  if (m.dim(p + 1, q) > 0) den = image_basis(op_matrix(m, Op::DelPi, p + 1, q));
  if (m.dim(p, q - 1) > 0)
    den = subspace_sum(den, image_basis(op_matrix(m, Op::Dbar, p, q - 1)));
  cell.dim = quotient_dim(num, den);
  if (reps)
    for (const auto& v : num.complement_of(den))
      cell.reps.push_back(m.form_str(m.from_vector(p, q, v)));
  return cell;
}

CohomologyTable bc_or_aeppli(const Model& m, TableKind kind, Exec exec, bool reps) {
  m.require_validated();
  auto cells = all_bidegrees(m);
  std::vector<BCCell> out(cells.size());
  parallel_for(exec, static_cast<int>(cells.size()), [&](int i) {
    auto [p, q] = cells[i];
    out[i] = kind == TableKind::BC ? bott_chern_cell(m, p, q, reps)
                                   : aeppli_cell(m, p, q, reps);
  });
  CohomologyTable t;
  t.kind = kind;
  for (size_t i = 0; i < cells.size(); ++i) {
    t.bigraded[cells[i]] = out[i].dim;
    if (reps && !out[i].reps.empty()) t.bigraded_reps[cells[i]] = std::move(out[i].reps);
  }
  return t;
}

}  // namespace

CohomologyTable bott_chern(const Model& m, Exec exec, bool reps) {
  return bc_or_aeppli(m, TableKind::BC, exec, reps);
}

CohomologyTable aeppli(const Model& m, Exec exec, bool reps) {
  return bc_or_aeppli(m, TableKind::Aeppli, exec, reps);
}

HodgeDiamond hodge_diamond(const Model& m, Exec exec) {
  CohomologyTable t = dolbeault(m, exec);
  HodgeDiamond h;
  h.n = m.n;
  h.h = t.bigraded;
  return h;
}

CohomologyTable kb_from_hodge(const HodgeDiamond& h, int n) {
  CohomologyTable t;
  t.kind = TableKind::KB;
  for (int k = 0; k <= 2 * n; ++k) t.graded[k] = 0;
  for (const auto& [pq, d] : h.h) {
    int k = n - pq.first + pq.second;
    if (k >= 0 && k <= 2 * n) t.graded[k] += d;
  }
  return t;
}

HodgeDiamond kunneth(const HodgeDiamond& a, const HodgeDiamond& b) {
  HodgeDiamond out;
  out.n = a.n + b.n;
  for (const auto& [pq1, d1] : a.h) {
    if (d1 == 0) continue;
    for (const auto& [pq2, d2] : b.h) {
      if (d2 == 0) continue;
      out.h[{pq1.first + pq2.first, pq1.second + pq2.second}] += d1 * d2;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral sequence of the column filtration: F^s is spanned by the blocks
// with n - p >= s.  With Z(r,s,k) = { x in F^s of total degree k : Dx in
// F^(s+r) },
//   E_r^{s,t} = Z(r,s,s+t) / ( Z(r-1,s+1,s+t) + D Z(r-1,s-r+1,s+t-1) ).

namespace {

// Shared immutable data: the slices and total differentials of the filtered
// complex.  Solvers layer a private cache of Z spaces on top.
struct SSData {
  const Model& m;
  int kmax;
  std::vector<TotalSlice> slices;
  std::vector<SparseMatrix> diffs;

  explicit SSData(const Model& model)
      : m(model), kmax(max_total_degree(model, TotalGrading::KB)) {
    for (int k = 0; k <= kmax; ++k) {
      slices.push_back(total_slice(m, TotalGrading::KB, k));
      diffs.push_back(total_differential(m, TotalGrading::KB, k));
    }
  }

  int col_s(int p) const { return m.n - p; }

  // F^s inside T^k as a coordinate subspace.
  SubspaceBasis filtration(int s, int k) const {
    const TotalSlice& slice = slices[k];
    std::vector<SparseVector> rows;
    for (size_t b = 0; b < slice.blocks.size(); ++b) {
      if (col_s(slice.blocks[b].first) < s) continue;
      int off = slice.offsets[b];
      int end = (b + 1 < slice.offsets.size()) ? slice.offsets[b + 1] : slice.dim;
      for (int i = off; i < end; ++i) {
        SparseVector e(slice.dim);
        e.terms.emplace_back(i, Q(1));
        rows.push_back(std::move(e));
      }
    }
    return SubspaceBasis::from_vectors(slice.dim, rows);
  }
};

struct SSSolver {
  const SSData& d;
  std::map<std::tuple<int, int, int>, SubspaceBasis> zcache;

  explicit SSSolver(const SSData& data) : d(data) {}

  const SubspaceBasis& Z(int r, int s, int k) {
    auto key = std::make_tuple(r, s, k);
    auto it = zcache.find(key);
    if (it != zcache.end()) return it->second;
    SubspaceBasis out(k >= 0 && k <= d.kmax ? d.slices[k].dim : 0);
    if (k >= 0 && k <= d.kmax) {
      if (r == 0) {
        out = d.filtration(s, k);
      } else {
        SubspaceBasis fs = d.filtration(s, k);
        if (fs.dim() > 0) {
          if (k + 1 > d.kmax) {
            out = fs;  // the differential vanishes above the top degree
          } else {
            const TotalSlice& dst = d.slices[k + 1];
            // kernel of (project onto columns below s+r) o D restricted to F^s
            SparseMatrix proj(dst.dim, fs.dim());
            for (int j = 0; j < fs.dim(); ++j) {
              SparseVector img = d.diffs[k].apply(fs.vectors()[j]);
              for (const auto& [i, c] : img.terms) {
                size_t b = 0;
                while (b + 1 < dst.offsets.size() && dst.offsets[b + 1] <= i) ++b;
                if (d.col_s(dst.blocks[b].first) < s + r) proj.add(i, j, c);
              }
            }
            SubspaceBasis coeff_ker = kernel_basis(proj);
            std::vector<SparseVector> rows;
            for (const auto& kv : coeff_ker.vectors()) {
              SparseVector x(d.slices[k].dim);
              for (const auto& [j, c] : kv.terms)
                x = linear_combine(Q(1), x, c, fs.vectors()[j]);
              rows.push_back(std::move(x));
            }
            out = SubspaceBasis::from_vectors(d.slices[k].dim, rows);
          }
        }
      }
    }
    return zcache.emplace(key, std::move(out)).first->second;
  }

  SubspaceBasis boundary_image(int r, int s, int k) {
    if (k - 1 < 0) return SubspaceBasis(d.slices[k].dim);
    const SubspaceBasis& src = Z(r - 1, s - r + 1, k - 1);
    std::vector<SparseVector> rows;
    for (const auto& v : src.vectors()) rows.push_back(d.diffs[k - 1].apply(v));
    return SubspaceBasis::from_vectors(d.slices[k].dim, rows);
  }

  int cell_dim(int r, int s, int t) {
    int k = s + t;
    if (k < 0 || k > d.kmax) return 0;
    if (r == 0) return d.m.dim(d.m.n - s, t);
    const SubspaceBasis& zr = Z(r, s, k);
    SubspaceBasis den = subspace_sum(Z(r - 1, s + 1, k), boundary_image(r, s, k));
    return quotient_dim(zr, den);
  }
};

}  // namespace

CohomologyTable ss_page(const Model& m, int r, Exec exec) {
  if (r < 0) throw InvalidPage("spectral sequence page must be >= 0");
  m.require_validated();
  CohomologyTable t;
  t.kind = TableKind::SSPage;
  t.page = r;
  const int tmax = m.max_anti_degree();
  SSData data(m);
  std::vector<int> dims((m.n + 1) * (tmax + 1), 0);
  parallel_for(exec, m.n + 1, [&](int s) {
    SSSolver solver(data);
    for (int tt = 0; tt <= tmax; ++tt)
      dims[s * (tmax + 1) + tt] = solver.cell_dim(r, s, tt);
  });
  for (int s = 0; s <= m.n; ++s)
    for (int tt = 0; tt <= tmax; ++tt) t.bigraded[{s, tt}] = dims[s * (tmax + 1) + tt];
  return t;
}

CohomologyTable ss_infinity(const Model& m, Exec exec) {
  m.require_validated();
  CohomologyTable t;
  t.kind = TableKind::SSPage;
  t.page = -1;  // stable page
  const int kmax = max_total_degree(m, TotalGrading::KB);
  const int tmax = m.max_anti_degree();
  SSData data(m);
  std::vector<std::map<std::pair<int, int>, int>> per_k(kmax + 1);
  parallel_for(exec, kmax + 1, [&](int k) {
    const TotalSlice& slice = data.slices[k];
    if (slice.dim == 0) return;
    SubspaceBasis ker = kernel_basis(data.diffs[k]);
    SubspaceBasis img =
        k > 0 ? image_basis(data.diffs[k - 1]) : SubspaceBasis(slice.dim);
    for (int s = 0; s <= m.n; ++s) {
      int tt = k - s;
      if (tt < 0 || tt > tmax) continue;
      SubspaceBasis fs_k = intersect(data.filtration(s, k), ker);
      SubspaceBasis fs1_k = intersect(data.filtration(s + 1, k), ker);
      SubspaceBasis fs_b = intersect(data.filtration(s, k), img);
      per_k[k][{s, tt}] = quotient_dim(fs_k, subspace_sum(fs1_k, fs_b));
    }
  });
  for (int s = 0; s <= m.n; ++s)
    for (int tt = 0; tt <= tmax; ++tt) t.bigraded[{s, tt}] = 0;
  for (int k = 0; k <= kmax; ++k)
    for (const auto& [st, dd] : per_k[k]) t.bigraded[st] = dd;
  return t;
}

}  // namespace koszul
