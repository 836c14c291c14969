#include <doctest.h>

#include <algorithm>
#include <random>

#include "koszul/linalg.hpp"
#include "koszul/model.hpp"
#include "koszul/operators.hpp"

using namespace koszul;

namespace {

// ---------------------------------------------------------------------------
// Independent oracle: dense Gaussian elimination with plain division.  This is
// deliberately a different algorithm from the library's fraction-free path.

struct Dense {
  int rows = 0, cols = 0;
  std::vector<std::vector<Q>> a;
  Dense(int r, int c) : rows(r), cols(c), a(r, std::vector<Q>(c)) {}
};

Dense to_dense(const SparseMatrix& m) {
  Dense d(m.rows(), m.cols());
  for (const auto& [rc, v] : m.entries()) d.a[rc.first][rc.second] = v;
  return d;
}

int dense_rank(Dense d) {
  int r = 0;
  for (int c = 0; c < d.cols && r < d.rows; ++c) {
    int pivot = -1;
    for (int i = r; i < d.rows; ++i)
      if (!d.a[i][c].is_zero()) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(d.a[r], d.a[pivot]);
    Q inv = d.a[r][c].inv();
    for (int j = c; j < d.cols; ++j) d.a[r][j] *= inv;
    for (int i = 0; i < d.rows; ++i) {
      if (i == r || d.a[i][c].is_zero()) continue;
      Q f = d.a[i][c];
      for (int j = c; j < d.cols; ++j) d.a[i][j] -= f * d.a[r][j];
    }
    ++r;
  }
  return r;
}

int dense_rank_of_vectors(int ambient, const std::vector<SparseVector>& vs) {
  Dense d(static_cast<int>(vs.size()), ambient);
  for (size_t i = 0; i < vs.size(); ++i)
    for (const auto& [j, v] : vs[i].terms) d.a[i][j] = v;
  return dense_rank(std::move(d));
}

Q random_entry(std::mt19937& rng) {
  // the scalars named in the test plan: 0, +-1, +-i, +-1/2
  switch (rng() % 7) {
    case 0: return Q(0);
    case 1: return Q(1);
    case 2: return Q(-1);
    case 3: return Q::i();
    case 4: return -Q::i();
    case 5: return Q(Rational(1, 2));
    default: return Q(Rational(-1, 2));
  }
}

SparseMatrix random_matrix(std::mt19937& rng, int rows, int cols, double density) {
  SparseMatrix m(rows, cols);
  std::uniform_real_distribution<double> u(0, 1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (u(rng) < density) m.add(r, c, random_entry(rng));
  return m;
}

SparseVector unit(int dim, int i) {
  SparseVector v(dim);
  v.terms.emplace_back(i, Q(1));
  return v;
}

}  // namespace

TEST_CASE("gaussian rational arithmetic and text form") {
  CHECK(Q(Rational(1, 2)) == Q(Rational(2, 4)));
  CHECK((Q::i() * Q::i()) == Q(-1));
  Q z(Rational(3, 4), Rational(-2, 6));
  CHECK(z.str() == "3/4-1/3i");
  CHECK(*Q::parse("3/4-1/3i") == z);
  CHECK(*Q::parse("-i") == -Q::i());
  CHECK(*Q::parse("0") == Q(0));
  CHECK(*Q::parse("7") == Q(7));
  CHECK(*Q::parse("2i") == Q(Rational(0), Rational(2)));
  CHECK(!Q::parse("1+2"));
  CHECK(!Q::parse("i+1"));
  CHECK(!Q::parse("1/0"));
  CHECK((z * z.inv()).is_one());
  // str/parse round-trip on random values
  std::mt19937 rng(7);
  for (int t = 0; t < 200; ++t) {
    Q v(Rational(int(rng() % 19) - 9, int(rng() % 6) + 1),
        Rational(int(rng() % 19) - 9, int(rng() % 6) + 1));
    CAPTURE(v.str());
    CHECK(*Q::parse(v.str()) == v);
  }
}

TEST_CASE("rank: pinned values") {
  CHECK(rank(SparseMatrix(0, 0)) == 0);
  SparseMatrix id5(5, 5);
  for (int i = 0; i < 5; ++i) id5.add(i, i, Q(1));
  CHECK(rank(id5) == 5);

  // dbar from (0,1) to (0,2) on the three-dimensional nilmanifold model: the
  // only generator with a nonzero image gives rank 1, kernel spanned by the
  // first and third generators.
  Model m = builtin("iwasawa3");
  SparseMatrix db = op_matrix(m, Op::Dbar, 0, 1);
  CHECK(db.cols() == 3);
  CHECK(rank(db) == 1);
  SubspaceBasis ker = kernel_basis(db);
  CHECK(ker.dim() == 2);
  CHECK(ker.contains(unit(3, 0)));
  CHECK(ker.contains(unit(3, 2)));
  CHECK(!ker.contains(unit(3, 1)));
}

TEST_CASE("kernel: pinned values") {
  CHECK(kernel_basis(SparseMatrix(4, 4)).dim() == 4);
  SparseMatrix id5(5, 5);
  for (int i = 0; i < 5; ++i) id5.add(i, i, Q(1));
  CHECK(kernel_basis(id5).dim() == 0);
}

TEST_CASE("solve: pinned values") {
  SparseMatrix id3(3, 3);
  for (int i = 0; i < 3; ++i) id3.add(i, i, Q(1));
  SparseVector b(3);
  b.set(0, Q(2));
  b.set(2, Q::i());
  auto x = solve(id3, b);
  REQUIRE(x);
  CHECK(*x == b);

  SparseMatrix z(3, 3);
  CHECK(!solve(z, b));

  // dbar(v2) = -v1^v3 on the three-dimensional model: solving for the
  // preimage of -v1^v3 returns exactly v2.
  Model m = builtin("iwasawa3");
  SparseMatrix db = op_matrix(m, Op::Dbar, 0, 1);
  FormExpr rhs(0, 2);
  rhs.add(Monomial{0, 0b101u}, Q(-1));
  auto pre = solve(db, m.to_vector(rhs));
  REQUIRE(pre);
  CHECK(*pre == unit(3, 1));
}

TEST_CASE("quotient_dim and intersect: pinned values") {
  SubspaceBasis v3 = SubspaceBasis::full(3);
  CHECK(quotient_dim(v3, v3) == 0);
  CHECK(quotient_dim(v3, SubspaceBasis(3)) == 3);
  CHECK_THROWS_AS(quotient_dim(SubspaceBasis(3), v3), NotASubspace);
  CHECK_THROWS_AS(intersect(SubspaceBasis(3), SubspaceBasis(4)), AmbientMismatch);

  CHECK(intersect(v3, v3) == v3);
  SubspaceBasis e12 = SubspaceBasis::from_vectors(4, {unit(4, 0), unit(4, 1)});
  SubspaceBasis e34 = SubspaceBasis::from_vectors(4, {unit(4, 2), unit(4, 3)});
  CHECK(intersect(e12, e34).dim() == 0);

  // span{e1, e1+e2} ^ span{e2, e3} = span{e2}
  SparseVector e1e2(3);
  e1e2.set(0, Q(1));
  e1e2.set(1, Q(1));
  SubspaceBasis a = SubspaceBasis::from_vectors(3, {unit(3, 0), e1e2});
  SubspaceBasis b = SubspaceBasis::from_vectors(3, {unit(3, 1), unit(3, 2)});
  SubspaceBasis cap = intersect(a, b);
  CHECK(cap.dim() == 1);
  CHECK(cap.contains(unit(3, 1)));

  // kernel of dbar on (0,1) modulo the image from (0,0) has dimension 2
  Model m = builtin("iwasawa3");
  SubspaceBasis ker = kernel_basis(op_matrix(m, Op::Dbar, 0, 1));
  SubspaceBasis img = image_basis(op_matrix(m, Op::Dbar, 0, 0));
  CHECK(quotient_dim(ker, img) == 2);
}

TEST_CASE("agreement with the dense oracle on random matrices") {
  std::mt19937 rng(123456);
  for (int t = 0; t < 60; ++t) {
    int rows = 1 + int(rng() % 12), cols = 1 + int(rng() % 12);
    SparseMatrix m = random_matrix(rng, rows, cols, 0.4);
    int r = rank(m);
    CHECK(r == dense_rank(to_dense(m)));
    SubspaceBasis ker = kernel_basis(m);
    CHECK(r + ker.dim() == cols);
    for (const auto& v : ker.vectors()) CHECK(m.apply(v).is_zero());
    SubspaceBasis img = image_basis(m);
    CHECK(img.dim() == r);
  }
}

TEST_CASE("solve round-trips whenever it succeeds") {
  std::mt19937 rng(99);
  int successes = 0, failures = 0;
  for (int t = 0; t < 80; ++t) {
    int rows = 1 + int(rng() % 10), cols = 1 + int(rng() % 10);
    SparseMatrix m = random_matrix(rng, rows, cols, 0.35);
    SparseVector b(rows);
    if (t % 2 == 0) {
      // in-image right-hand side: m * (random x)
      SparseVector x(cols);
      for (int c = 0; c < cols; ++c) x.set(c, random_entry(rng));
      b = m.apply(x);
    } else {
      for (int r = 0; r < rows; ++r) b.set(r, random_entry(rng));
    }
    auto x = solve(m, b);
    if (x) {
      ++successes;
      CHECK(m.apply(*x) == b);
    } else {
      ++failures;
      CHECK(!image_basis(m).contains(b));
    }
  }
  CHECK(successes > 10);
  CHECK(failures > 5);
}

TEST_CASE("intersection and sum dimensions agree with the oracle") {
  std::mt19937 rng(4242);
  for (int t = 0; t < 40; ++t) {
    int n = 2 + int(rng() % 10);
    std::vector<SparseVector> va, vb;
    int na = 1 + int(rng() % 4), nb = 1 + int(rng() % 4);
    for (int i = 0; i < na; ++i) {
      SparseVector v(n);
      for (int j = 0; j < n; ++j) v.set(j, random_entry(rng));
      va.push_back(v);
    }
    for (int i = 0; i < nb; ++i) {
      SparseVector v(n);
      for (int j = 0; j < n; ++j) v.set(j, random_entry(rng));
      vb.push_back(v);
    }
    SubspaceBasis a = SubspaceBasis::from_vectors(n, va);
    SubspaceBasis b = SubspaceBasis::from_vectors(n, vb);
    CHECK(a.dim() == dense_rank_of_vectors(n, va));
    CHECK(b.dim() == dense_rank_of_vectors(n, vb));
    std::vector<SparseVector> stacked = va;
    stacked.insert(stacked.end(), vb.begin(), vb.end());
    int dim_sum = dense_rank_of_vectors(n, stacked);
    SubspaceBasis cap = intersect(a, b);
    CHECK(subspace_sum(a, b).dim() == dim_sum);
    CHECK(cap.dim() == a.dim() + b.dim() - dim_sum);
    for (const auto& v : cap.vectors()) {
      CHECK(a.contains(v));
      CHECK(b.contains(v));
    }
  }
}

TEST_CASE("results do not depend on entry insertion order") {
  std::mt19937 rng(31337);
  for (int t = 0; t < 10; ++t) {
    int rows = 3 + int(rng() % 8), cols = 3 + int(rng() % 8);
    SparseMatrix m = random_matrix(rng, rows, cols, 0.5);
    SparseMatrix shuffled(rows, cols);
    std::vector<std::pair<std::pair<int, int>, Q>> entries(m.entries().begin(),
                                                           m.entries().end());
    std::shuffle(entries.begin(), entries.end(), rng);
    for (const auto& [rc, v] : entries) shuffled.add(rc.first, rc.second, v);
    CHECK(m == shuffled);
    CHECK(rank(m) == rank(shuffled));
    CHECK(kernel_basis(m) == kernel_basis(shuffled));
  }
}

TEST_CASE("complement_of produces an exact complement") {
  std::mt19937 rng(555);
  for (int t = 0; t < 20; ++t) {
    int n = 3 + int(rng() % 8);
    SparseMatrix m = random_matrix(rng, n, n, 0.4);
    SubspaceBasis big = image_basis(m);
    SparseMatrix m2 = random_matrix(rng, n, n, 0.2);
    SubspaceBasis small = intersect(big, image_basis(m2));
    auto extra = big.complement_of(small);
    CHECK(static_cast<int>(extra.size()) == big.dim() - small.dim());
    SubspaceBasis rebuilt = small;
    for (const auto& v : extra)
      rebuilt = subspace_sum(rebuilt, SubspaceBasis::from_vectors(n, {v}));
    CHECK(rebuilt == big);
  }
}
