#include "koszul/mc.hpp"

namespace koszul {

std::string obstruction_kind_name(ObstructionKind k) {
  switch (k) {
    case ObstructionKind::NotDbarClosed: return "not-dbar-closed";
    case ObstructionKind::NotDelPiExact: return "not-delpi-exact";
    case ObstructionKind::NoZeta: return "no-zeta";
  }
  return "?";
}

FormExpr delpi_close(const Model& m, const FormExpr& alpha, CloseMethod method) {
  m.require_validated();
  if (alpha.p() != 1 || alpha.q() != 1)
    throw PreconditionViolated("representative selection expects a (1,1)-form");
  if (!apply(m, Op::Dbar, alpha).is_zero())
    throw NotClosed("the form is not dbar-closed");
  const Op op1 = method == CloseMethod::DpiDbar ? Op::DelPi : Op::Del;
  FormExpr obstruction = apply(m, op1, alpha);
  if (obstruction.is_zero()) return alpha;  // gamma = 0 is the canonical choice

  const bool lemma_holds = method == CloseMethod::DpiDbar ? check_dpidbar(m).holds
                                                          : check_deldbar(m).holds;
  if (!lemma_holds)
    throw LemmaUnavailable(std::string("the ") +
                           (method == CloseMethod::DpiDbar ? "dpidbar" : "ddbar") +
                           " lemma fails on this model");

  // Solve op1(alpha) = op1(dbar(gamma)) for gamma of bidegree (1,0).
  SparseMatrix dbar_10 = op_matrix(m, Op::Dbar, 1, 0);
  SparseMatrix op1_11 = op_matrix(m, op1, 1, 1);
  auto gamma_vec = solve(multiply(op1_11, dbar_10), m.to_vector(obstruction));
  if (!gamma_vec)
    throw InternalInconsistency(
        "lemma holds but the representative system is unsolvable");
  FormExpr gamma = m.from_vector(1, 0, *gamma_vec);
  FormExpr out = alpha - apply(m, Op::Dbar, gamma);
  if (!apply(m, op1, out).is_zero())
    throw InternalInconsistency("representative selection did not close the form");
  return out;
}

MCOutcome solve_mc(const Model& m, const FormExpr& alpha1, int order) {
  m.require_validated();
  if (order < 1) throw PreconditionViolated("series order must be at least 1");
  if (alpha1.p() != 1 || alpha1.q() != 1)
    throw PreconditionViolated("the seed must be a (1,1)-form");
  if (!apply(m, Op::Dbar, alpha1).is_zero())
    throw PreconditionViolated("the seed must be dbar-closed");
  // A delpi-closed seed (delpi_close) is what the construction assumes, but
  // the recursion itself only needs each bracket sum to be integrable, so a
  // merely dbar-closed seed is accepted and may hit a genuine obstruction.

  MCSeries s;
  s.order = order;
  s.alpha.assign(order + 1, FormExpr(1, 1));
  s.beta.assign(order + 1, FormExpr(2, 1));
  s.alpha[1] = alpha1;

  // gamma_k = delpi(dbar(zeta)) with zeta of bidegree (2,1).
  SparseMatrix dbar_21 = op_matrix(m, Op::Dbar, 2, 1);
  SparseMatrix delpi_22 = op_matrix(m, Op::DelPi, 2, 2);
  SparseMatrix system = multiply(delpi_22, dbar_21);

  for (int k = 1; k < order; ++k) {
    FormExpr gamma(1, 2);
    for (int i = 1; i <= k; ++i)
      gamma += bracket_delpi(m, s.alpha[i], s.alpha[k + 1 - i]);
    if (!apply(m, Op::Dbar, gamma).is_zero())
      return Obstruction{k, gamma, ObstructionKind::NotDbarClosed};
    if (gamma.is_zero()) {
      // zeta = 0 is the canonical solution; the next order vanishes.
      continue;
    }
    SparseVector rhs = m.to_vector(gamma);
    if (!solve(delpi_22, rhs))
      return Obstruction{k, gamma, ObstructionKind::NotDelPiExact};
    auto zeta = solve(system, rhs);
    if (!zeta) return Obstruction{k, gamma, ObstructionKind::NoZeta};
    FormExpr half_zeta = Q(Rational(1, 2)) * m.from_vector(2, 1, *zeta);
    s.beta[k + 1] = half_zeta;
    s.alpha[k + 1] = apply(m, Op::DelPi, half_zeta);
  }
  return s;
}

std::vector<MCResidual> verify_mc(const Model& m, const MCSeries& s) {
  m.require_validated();
  std::vector<MCResidual> out;
  for (int k = 1; k <= s.order; ++k) {
    FormExpr r = apply(m, Op::Dbar, s.alpha[k]);
    FormExpr brackets(1, 2);
    for (int i = 1; i <= k - 1; ++i)
      brackets += bracket_delpi(m, s.alpha[i], s.alpha[k - i]);
    r += Q(Rational(1, 2)) * brackets;
    out.push_back({k, std::move(r)});
  }
  return out;
}

Tangent tangent(const Model& m, const FormExpr& alpha1) {
  m.require_validated();
  if (!apply(m, Op::Dbar, alpha1).is_zero())
    throw PreconditionViolated("the seed must be dbar-closed");
  Tangent t{pi_sharp(m, alpha1), false};
  t.dbar_closed = apply_poly(m, Op::Dbar, t.value).is_zero();
  return t;
}

std::vector<std::pair<int, PolyvectorExpr>> verify_pushforward(const Model& m,
                                                               const MCSeries& s) {
  m.require_validated();
  std::vector<PolyvectorExpr> push(s.order + 1, PolyvectorExpr(1, 1));
  for (int k = 1; k <= s.order; ++k) push[k] = pi_sharp(m, s.alpha[k]);
  std::vector<std::pair<int, PolyvectorExpr>> out;
  for (int k = 1; k <= s.order; ++k) {
    PolyvectorExpr r = apply_poly(m, Op::Dbar, push[k]);
    PolyvectorExpr brackets(1, 2);
    for (int i = 1; i <= k - 1; ++i) brackets += schouten(m, push[i], push[k - i]);
    r += Q(Rational(1, 2)) * brackets;
    out.emplace_back(k, std::move(r));
  }
  return out;
}

}  // namespace koszul
