#pragma once

#include <map>
#include <string>
#include <utility>

#include "koszul/model.hpp"

namespace koszul {

/// The differential-geometric operators of the calculus.  Del/Dbar/IotaPi/
/// DelPi/BPi are bidegree-homogeneous; D, DPi and the exponentials produce
/// mixed holomorphic degree and act on MixedForm.
enum class Op { Del, Dbar, D, IotaPi, DelPi, DPi, BPi, ExpIota, ExpIotaInv };

bool op_homogeneous(Op op);
std::pair<int, int> op_shift(Op op);  // throws KindMismatch for inhomogeneous ops
std::string op_name(Op op);

/// A finite sum of forms of several bidegrees (no zero components stored).
class MixedForm {
 public:
  MixedForm() = default;
  explicit MixedForm(const FormExpr& f) { add(f); }

  void add(const FormExpr& f) {
    if (f.is_zero()) return;
    auto key = std::make_pair(f.p(), f.q());
    auto it = comps_.find(key);
    if (it == comps_.end()) {
      comps_.emplace(key, f);
    } else {
      it->second += f;
      if (it->second.is_zero()) comps_.erase(it);
    }
  }

  const std::map<std::pair<int, int>, FormExpr>& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }

  FormExpr component(int p, int q) const {
    auto it = comps_.find({p, q});
    return it == comps_.end() ? FormExpr(p, q) : it->second;
  }

  MixedForm& operator+=(const MixedForm& o) {
    for (const auto& [pq, f] : o.comps_) add(f);
    return *this;
  }
  MixedForm& operator-=(const MixedForm& o) {
    for (const auto& [pq, f] : o.comps_) add(Q(-1) * f);
    return *this;
  }
  MixedForm& operator*=(const Q& s);

  bool operator==(const MixedForm&) const = default;

 private:
  std::map<std::pair<int, int>, FormExpr> comps_;
};

FormExpr apply(const Model& m, Op op, const FormExpr& f);
MixedForm apply_mixed(const Model& m, Op op, const MixedForm& f);
PolyvectorExpr apply_poly(const Model& m, Op op, const PolyvectorExpr& f);

/// Matrix of a homogeneous operator from basis(p,q) to the shifted basis,
/// both in canonical order.
SparseMatrix op_matrix(const Model& m, Op op, int p, int q);
SparseMatrix poly_op_matrix(const Model& m, Op op, int s, int t);

FormExpr wedge(const Model& m, const FormExpr& a, const FormExpr& b);
PolyvectorExpr poly_wedge(const Model& m, const PolyvectorExpr& a,
                          const PolyvectorExpr& b);

/// Gerstenhaber bracket generated by the degree -1 operator: for a of total
/// degree k,  [a,b] = (-1)^k ( dp(a^b) - dp(a)^b - (-1)^k a^dp(b) ).
FormExpr bracket_delpi(const Model& m, const FormExpr& a, const FormExpr& b);

/// sum_k (dir)^k iota^k / k! applied to f; finite since the contraction is
/// nilpotent.  exp_iota(exp_iota(f,+1),-1) returns f.
MixedForm exp_iota(const Model& m, const FormExpr& f, int direction);
MixedForm exp_iota_mixed(const Model& m, const MixedForm& f, int direction);

/// Schouten bracket of constant-coefficient polyvectors (antiholomorphic legs
/// ride along with Koszul signs).
PolyvectorExpr schouten(const Model& m, const PolyvectorExpr& a,
                        const PolyvectorExpr& b);

PolyvectorExpr poisson_polyvector(const Model& m);

/// Anchor map to polyvectors: multiplicative extension of alpha -> pi(alpha,.)
/// on holomorphic 1-forms; antiholomorphic factors pass through unchanged.
PolyvectorExpr pi_sharp(const Model& m, const FormExpr& f);

/// The contraction-ordering convention is fixed once by two built-in anchor
/// computations; this recomputes them and reports.
struct CalibrationResult {
  bool ok = false;
  std::string detail;
};
CalibrationResult calibration_selftest();
void require_calibrated();  // cached; throws InternalInconsistency on failure

}  // namespace koszul
