#include <doctest.h>

#include "corpus.hpp"
#include "koszul/cohomology.hpp"

using namespace koszul;
using koszul::testing::corpus;
using koszul::testing::corpus_model;

TEST_CASE("dolbeault: pinned tables") {
  Model t1 = corpus_model("torus_1", "0");
  CohomologyTable td = dolbeault(t1);
  for (int p = 0; p <= 1; ++p)
    for (int q = 0; q <= 1; ++q) CHECK(td.at(p, q) == 1);

  Model m3 = corpus_model("iwasawa3", "1 X2^X3");
  CohomologyTable d3 = dolbeault(m3);
  CHECK(d3.at(0, 1) == 2);
  CHECK(d3.at(1, 0) == 3);
  // the full table of the six-generator complex, row p, column q
  const int expect[4][4] = {
      {1, 2, 2, 1}, {3, 6, 6, 3}, {3, 6, 6, 3}, {1, 2, 2, 1}};
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q) CHECK(d3.at(p, q) == expect[p][q]);

  // dbar is trivial on both solvmanifold models, so every cell is the full
  // bidegree dimension.
  for (const char* name : {"nakamura_case1", "nakamura_case2"}) {
    Model n = corpus_model(name, "1 X2^X3");
    CohomologyTable t = dolbeault(n);
    for (int p = 0; p <= 3; ++p)
      for (int q = 0; q <= n.max_anti_degree(); ++q)
        CHECK(t.at(p, q) == n.dim(p, q));
  }
}

TEST_CASE("delpi cohomology: pinned tables") {
  Model m3 = corpus_model("iwasawa3", "1 X1^X2 + -1 X2^X3");
  CohomologyTable t = delpi_cohomology(m3);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q) CHECK(t.at(p, q) == m3.dim(p, q));

  Model t2 = corpus_model("torus_2", "0");
  CohomologyTable tt = delpi_cohomology(t2);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) CHECK(tt.at(p, q) == t2.dim(p, q));

  // on the sixfold with pi = X1^X3, exactly one (5,0) monomial is not closed
  Model m6 = corpus_model("iwasawa6", "1 X1^X3");
  SparseMatrix d50 = op_matrix(m6, Op::DelPi, 5, 0);
  CHECK(rank(d50) == 1);
  CHECK(kernel_basis(d50).dim() == 5);
}

TEST_CASE("total homology: pinned values and the zero-bivector identification") {
  Model m6 = corpus_model("iwasawa6", "1 X1^X3");
  CohomologyTable kb = kb_homology(m6);
  CHECK(kb.at(0) == 1);
  CHECK(kb.at(1) == 8);

  // with pi = 0 the table is exactly the reindexed Dolbeault table
  for (const auto& entry : corpus()) {
    Model m = corpus_model(entry.model, "0");
    CohomologyTable kb0 = kb_homology(m);
    CohomologyTable dol = dolbeault(m);
    for (int k = 0; k <= 2 * m.n; ++k) {
      int sum = 0;
      for (int p = 0; p <= m.n; ++p)
        for (int q = 0; q <= m.max_anti_degree(); ++q)
          if (m.n - p + q == k) sum += dol.at(p, q);
      CHECK(kb0.at(k) == sum);
    }
  }

  // H_3 of the threefold with pi = 0 is the sum over p = q
  Model m3 = corpus_model("iwasawa3", "0");
  CohomologyTable kb3 = kb_homology(m3);
  CohomologyTable d3 = dolbeault(m3);
  int diag = 0;
  for (int p = 0; p <= 3; ++p) diag += d3.at(p, p);
  CHECK(kb3.at(3) == diag);
}

TEST_CASE("poincare-style duality of the total homology on the whole corpus") {
  for (const auto& entry : corpus()) {
    for (const auto& pi : entry.poissons) {
      Model m = corpus_model(entry.model, pi);
      CAPTURE(entry.model);
      CAPTURE(pi);
      CohomologyTable kb = kb_homology(m);
      const int kmax = max_total_degree(m, TotalGrading::KB);
      for (int k = 0; k <= kmax; ++k) CHECK(kb.at(k) == kb.at(kmax - k));
      CHECK(kb.notes.empty());
    }
  }
}

TEST_CASE("total differentials square to zero on all three complexes") {
  for (const auto& entry : corpus()) {
    for (const auto& pi : entry.poissons) {
      Model m = corpus_model(entry.model, pi);
      CAPTURE(entry.model);
      CAPTURE(pi);
      for (TotalGrading g : {TotalGrading::KB, TotalGrading::DeRham, TotalGrading::LP}) {
        const int kmax = max_total_degree(m, g);
        for (int k = 0; k + 1 <= kmax; ++k) {
          SparseMatrix a = total_differential(m, g, k);
          SparseMatrix b = total_differential(m, g, k + 1);
          CHECK(multiply(b, a).nnz() == 0);
        }
      }
    }
  }
}

TEST_CASE("polyvector cohomology: pinned values") {
  // all differentials vanish on the one-dimensional torus
  Model t1 = corpus_model("torus_1", "0");
  CohomologyTable lp = lp_cohomology(t1);
  CHECK(lp.at(0) == 1);
  CHECK(lp.at(1) == 2);
  CHECK(lp.at(2) == 1);

  // constants are always closed under the adjoint differential
  for (const auto& entry : corpus()) {
    for (const auto& pi : entry.poissons) {
      Model m = corpus_model(entry.model, pi);
      PolyvectorExpr one(0, 0);
      one.add(m.one_monomial(), Q(1));
      CHECK(apply_poly(m, Op::BPi, one).is_zero());
    }
  }

  // unimodular data on the threefold: dim H_k matches dim H^(2n-k)
  Model m3 = corpus_model("iwasawa3", "1 X2^X3");
  CohomologyTable kb = kb_homology(m3);
  CohomologyTable lp3 = lp_cohomology(m3);
  for (int k = 0; k <= 6; ++k) CHECK(kb.at(k) == lp3.at(6 - k));
}

TEST_CASE("spectral sequence: first page is the reindexed Dolbeault table") {
  for (const auto& entry : corpus()) {
    for (const auto& pi : entry.poissons) {
      if (entry.model == "iwasawa6") continue;  // covered by the acceptance suite
      Model m = corpus_model(entry.model, pi);
      CAPTURE(entry.model);
      CAPTURE(pi);
      CohomologyTable e1 = ss_page(m, 1);
      CohomologyTable dol = dolbeault(m);
      for (int s = 0; s <= m.n; ++s)
        for (int t = 0; t <= m.max_anti_degree(); ++t)
          CHECK(e1.at(s, t) == dol.at(m.n - s, t));
    }
  }
}

TEST_CASE("spectral sequence: monotonicity, stability, convergence, Euler sums") {
  for (const char* name : {"iwasawa3", "nakamura_case1", "nakamura_case2"}) {
    for (const char* pi : {"1 X1^X2", "1 X2^X3"}) {
      Model m = corpus_model(name, pi);
      CAPTURE(name);
      CAPTURE(pi);
      std::vector<CohomologyTable> pages;
      for (int r = 0; r <= m.n + 2; ++r) pages.push_back(ss_page(m, r));
      CohomologyTable einf = ss_infinity(m);
      CohomologyTable kb = kb_homology(m);
      const int tmax = m.max_anti_degree();
      for (int s = 0; s <= m.n; ++s) {
        for (int t = 0; t <= tmax; ++t) {
          for (size_t r = 1; r + 1 < pages.size(); ++r)
            CHECK(pages[r + 1].at(s, t) <= pages[r].at(s, t));
          // the page formula stabilizes to the filtration quotients
          CHECK(pages.back().at(s, t) == einf.at(s, t));
        }
      }
      for (int k = 0; k <= m.n + tmax; ++k) {
        int sum = 0;
        for (int s = 0; s <= m.n; ++s)
          if (k - s >= 0 && k - s <= tmax) sum += einf.at(s, k - s);
        CHECK(sum == kb.at(k));
      }
      // the alternating sum across antidiagonals is the same on every page
      // and equals the Euler characteristic of the total complex
      std::vector<long> euler(pages.size(), 0);
      long euler_h = 0;
      for (int k = 0; k <= m.n + tmax; ++k) {
        int sign = (k & 1) ? -1 : 1;
        euler_h += sign * kb.at(k);
        for (size_t r = 0; r < pages.size(); ++r)
          for (int s = 0; s <= m.n; ++s)
            if (k - s >= 0 && k - s <= tmax) euler[r] += sign * pages[r].at(s, k - s);
      }
      for (size_t r = 1; r < pages.size(); ++r) CHECK(euler[r] == euler[0]);
      CHECK(euler.back() == euler_h);
    }
  }
}

TEST_CASE("spectral sequence: second page drops on the k=1 antidiagonal of the sixfold") {
  Model m = corpus_model("iwasawa6", "1 X1^X3");
  CohomologyTable e1 = ss_page(m, 1);
  CohomologyTable e2 = ss_page(m, 2);
  CHECK(e1.at(0, 1) + e1.at(1, 0) == 9);
  CHECK(e2.at(0, 1) + e2.at(1, 0) == 8);
}

TEST_CASE("spectral sequence: all pages agree on the degenerate threefold") {
  Model m = corpus_model("iwasawa3", "1 X1^X2 + -1 X2^X3");
  CohomologyTable e1 = ss_page(m, 1);
  for (int r = 2; r <= 5; ++r) {
    CohomologyTable er = ss_page(m, r);
    for (int s = 0; s <= 3; ++s)
      for (int t = 0; t <= 3; ++t) CHECK(er.at(s, t) == e1.at(s, t));
  }
  CHECK_THROWS_AS(ss_page(m, -1), InvalidPage);
  // page 0 is the raw bigraded dimension table
  CohomologyTable e0 = ss_page(m, 0);
  for (int s = 0; s <= 3; ++s)
    for (int t = 0; t <= 3; ++t) CHECK(e0.at(s, t) == m.dim(3 - s, t));
}

TEST_CASE("bott-chern and aeppli: degenerate bivector and pinned cases") {
  // pi = 0: BC is the space of dbar-closed forms, Aeppli its cokernel side
  Model t2 = corpus_model("torus_2", "0");
  CohomologyTable bc = bott_chern(t2);
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) CHECK(bc.at(p, q) == t2.dim(p, q));

  Model m3 = corpus_model("iwasawa3", "0");
  CohomologyTable bc3 = bott_chern(m3);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q) {
      SubspaceBasis ker = kernel_basis(op_matrix(m3, Op::Dbar, p, q));
      CHECK(bc3.at(p, q) == ker.dim());
    }

  // both differentials trivial: every cell is the full dimension
  Model n2 = corpus_model("nakamura_case2", "1 X2^X3");
  CohomologyTable bcn = bott_chern(n2);
  CohomologyTable aen = aeppli(n2);
  for (int p = 0; p <= 3; ++p)
    for (int q = 0; q <= 3; ++q) {
      CHECK(bcn.at(p, q) == n2.dim(p, q));
      CHECK(aen.at(p, q) == n2.dim(p, q));
    }
}

TEST_CASE("formula mode: delta diamonds and Kunneth products") {
  auto delta = [](int n) {
    HodgeDiamond h;
    h.n = n;
    for (int p = 0; p <= n; ++p) h.h[{p, p}] = 1;
    return h;
  };
  // H_k of a delta diamond is concentrated at k = n
  for (int n = 1; n <= 4; ++n) {
    CohomologyTable t = kb_from_hodge(delta(n), n);
    for (int k = 0; k <= 2 * n; ++k) CHECK(t.at(k) == (k == n ? n + 1 : 0));
  }
  // point diamond is the Kunneth unit
  HodgeDiamond point;
  point.n = 0;
  point.h[{0, 0}] = 1;
  HodgeDiamond d3 = delta(3);
  CHECK(kunneth(d3, point).h == d3.h);
  CHECK(kunneth(point, d3).h == d3.h);
  // product of projective-space diamonds: (m+1)(n+1) in the middle
  for (int mdim = 1; mdim <= 3; ++mdim) {
    for (int ndim = 1; ndim <= 3; ++ndim) {
      HodgeDiamond prod = kunneth(delta(mdim), delta(ndim));
      CHECK(prod.n == mdim + ndim);
      CohomologyTable t = kb_from_hodge(prod, prod.n);
      CHECK(t.at(mdim + ndim) == (mdim + 1) * (ndim + 1));
      int total = 0;
      for (const auto& [k, d] : t.graded) total += d;
      CHECK(total == (mdim + 1) * (ndim + 1));
    }
  }
  // zero diamond in, zero table out
  HodgeDiamond zero;
  zero.n = 2;
  CohomologyTable zt = kb_from_hodge(kunneth(zero, delta(2)), 4);
  for (const auto& [k, d] : zt.graded) CHECK(d == 0);
}

TEST_CASE("representatives span the reported dimensions") {
  Model m3 = corpus_model("iwasawa3", "1 X2^X3");
  CohomologyTable kb = kb_homology(m3, Exec::Serial, true);
  for (const auto& [k, d] : kb.graded) {
    if (d == 0) continue;
    REQUIRE(kb.graded_reps.count(k));
    CHECK(static_cast<int>(kb.graded_reps.at(k).size()) == d);
  }
  CohomologyTable dol = dolbeault(m3, Exec::Serial, true);
  REQUIRE(dol.bigraded_reps.count({0, 1}));
  CHECK(dol.bigraded_reps.at({0, 1}).size() == 2);
}
