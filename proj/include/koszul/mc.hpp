#pragma once

#include <variant>
#include <vector>

#include "koszul/lemmas.hpp"

namespace koszul {

/// Truncated series a_t = sum a_k t^k of (1,1)-forms together with the
/// potentials that produced the higher orders: a_k = delpi(b_k) for k >= 2.
struct MCSeries {
  int order = 0;                // N
  std::vector<FormExpr> alpha;  // index k in [1, N]; alpha[0] unused
  std::vector<FormExpr> beta;   // index k in [2, N]; beta[0], beta[1] unused
  const FormExpr& a(int k) const { return alpha[k]; }
};

enum class ObstructionKind { NotDbarClosed, NotDelPiExact, NoZeta };
std::string obstruction_kind_name(ObstructionKind k);

struct Obstruction {
  int order = 0;    // the k whose bracket sum could not be integrated
  FormExpr gamma;   // (1,2) bracket sum at that order
  ObstructionKind failed = ObstructionKind::NoZeta;
};

using MCOutcome = std::variant<MCSeries, Obstruction>;

enum class CloseMethod { DelDbar, DpiDbar };

/// Replace a dbar-closed (1,1)-form by a cohomologous representative killed
/// by del_pi (DpiDbar) or by del (DelDbar).  Needs the matching lemma on the
/// model unless the form is already closed for the target operator.
FormExpr delpi_close(const Model& m, const FormExpr& alpha, CloseMethod method);

/// Order-by-order solution: gamma_k = sum_{i=1..k} [a_i, a_{k+1-i}], checked
/// dbar-closed and del_pi-exact, then integrated through zeta with
/// gamma_k = delpi(dbar(zeta)), b_{k+1} = zeta/2, a_{k+1} = delpi(b_{k+1}).
MCOutcome solve_mc(const Model& m, const FormExpr& alpha1, int order);

struct MCResidual {
  int k = 0;
  FormExpr value;  // exact residual of the order-k equation
};
std::vector<MCResidual> verify_mc(const Model& m, const MCSeries& s);

struct Tangent {
  PolyvectorExpr value;  // image of alpha_1 under the anchor map, (1,1)
  bool dbar_closed = false;
};
Tangent tangent(const Model& m, const FormExpr& alpha1);

/// Push a whole series to the vector-valued side and return the residuals of
/// its deformation equation there (bracket taken with schouten).
std::vector<std::pair<int, PolyvectorExpr>> verify_pushforward(const Model& m,
                                                               const MCSeries& s);

}  // namespace koszul
