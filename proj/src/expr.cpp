#include "expr.hpp"

#include <functional>
#include <unordered_map>

#include <Eigen/SVD>

namespace galmono {

namespace {

Expr make(ExprOp op, Complex v, int idx, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->value = v;
  n->index = idx;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const Expr& e, const Complex& c) {
  return e->op == ExprOp::Const && e->value == c;
}

}  // namespace

Expr constant(const Complex& c) { return make(ExprOp::Const, c, 0, nullptr, nullptr); }
Expr constant(double c) { return constant(Complex(c, 0.0)); }
Expr var_x(int i) { return make(ExprOp::VarX, {}, i, nullptr, nullptr); }
Expr var_z(int i) { return make(ExprOp::VarZ, {}, i, nullptr, nullptr); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a->op == ExprOp::Const && b->op == ExprOp::Const)
    return constant(a->value + b->value);
  if (is_const(a, Complex(0.0))) return b;
  if (is_const(b, Complex(0.0))) return a;
  return make(ExprOp::Add, {}, 0, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a->op == ExprOp::Const && b->op == ExprOp::Const)
    return constant(a->value - b->value);
  if (is_const(b, Complex(0.0))) return a;
  if (is_const(a, Complex(0.0))) return -b;
  return make(ExprOp::Sub, {}, 0, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a->op == ExprOp::Const && b->op == ExprOp::Const)
    return constant(a->value * b->value);
  if (is_const(a, Complex(0.0)) || is_const(b, Complex(0.0)))
    return constant(0.0);
  if (is_const(a, Complex(1.0))) return b;
  if (is_const(b, Complex(1.0))) return a;
  return make(ExprOp::Mul, {}, 0, a, b);
}

Expr operator-(const Expr& a) {
  if (a->op == ExprOp::Const) return constant(-a->value);
  if (a->op == ExprOp::Neg) return a->a;
  return make(ExprOp::Neg, {}, 0, a, nullptr);
}

Expr pow(const Expr& a, int k) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "pow: negative exponent");
  if (k == 0) return constant(1.0);
  if (k == 1) return a;
  if (a->op == ExprOp::Const) return constant(std::pow(a->value, k));
  return make(ExprOp::Pow, {}, k, a, nullptr);
}

namespace {

Expr diff_rec(const Expr& e, bool wrt_x, int index,
              std::unordered_map<const ExprNode*, Expr>& memo) {
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  Expr r;
  switch (e->op) {
    case ExprOp::Const:
      r = constant(0.0);
      break;
    case ExprOp::VarX:
      r = (wrt_x && e->index == index) ? constant(1.0) : constant(0.0);
      break;
    case ExprOp::VarZ:
      r = (!wrt_x && e->index == index) ? constant(1.0) : constant(0.0);
      break;
    case ExprOp::Add:
      r = diff_rec(e->a, wrt_x, index, memo) + diff_rec(e->b, wrt_x, index, memo);
      break;
    case ExprOp::Sub:
      r = diff_rec(e->a, wrt_x, index, memo) - diff_rec(e->b, wrt_x, index, memo);
      break;
    case ExprOp::Mul:
      r = diff_rec(e->a, wrt_x, index, memo) * e->b +
          e->a * diff_rec(e->b, wrt_x, index, memo);
      break;
    case ExprOp::Neg:
      r = -diff_rec(e->a, wrt_x, index, memo);
      break;
    case ExprOp::Pow:
      r = constant(double(e->index)) * pow(e->a, e->index - 1) *
          diff_rec(e->a, wrt_x, index, memo);
      break;
  }
  memo.emplace(e.get(), r);
  return r;
}

void check_symbols(const Expr& e, int n, int m,
                   std::unordered_map<const ExprNode*, bool>& seen) {
  if (seen.count(e.get())) return;
  seen.emplace(e.get(), true);
  if (e->op == ExprOp::VarX && (e->index < 0 || e->index >= n))
    fail(ErrorCode::InvalidArgument, "expression references undeclared unknown");
  if (e->op == ExprOp::VarZ && (e->index < 0 || e->index >= m))
    fail(ErrorCode::InvalidArgument, "expression references undeclared parameter");
  if (e->a) check_symbols(e->a, n, m, seen);
  if (e->b) check_symbols(e->b, n, m, seen);
}

}  // namespace

Expr diff(const Expr& e, bool wrt_x, int index) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return diff_rec(e, wrt_x, index, memo);
}

void SystemSpec::validate() const {
  if (static_cast<int>(equations.size()) != n)
    fail(ErrorCode::InvalidArgument, "system is not square");
  std::unordered_map<const ExprNode*, bool> seen;
  for (const auto& e : equations) check_symbols(e, n, m, seen);
}

CompiledSystem::CompiledSystem(SystemSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int n = spec_.n, m = spec_.m;
  jx_exprs_.reserve(static_cast<size_t>(n) * n);
  jz_exprs_.reserve(static_cast<size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      jx_exprs_.push_back(diff(spec_.equations[i], true, j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      jz_exprs_.push_back(diff(spec_.equations[i], false, j));

  tape_f_ = build_tape(spec_.equations, {}, {}, n, m);
  tape_fjx_ = build_tape(spec_.equations, jx_exprs_, {}, n, m);
  tape_full_ = build_tape(spec_.equations, jx_exprs_, jz_exprs_, n, m);
}

CompiledSystem::Tape CompiledSystem::build_tape(const std::vector<Expr>& f,
                                                const std::vector<Expr>& jx,
                                                const std::vector<Expr>& jz,
                                                int /*n*/, int /*m*/) {
  Tape t;
  std::unordered_map<const ExprNode*, int> slot;

  std::function<int(const Expr&)> emit = [&](const Expr& e) -> int {
    auto it = slot.find(e.get());
    if (it != slot.end()) return it->second;
    int a = -1, b = -1;
    if (e->a) a = emit(e->a);
    if (e->b) b = emit(e->b);
    Instr ins;
    ins.op = e->op;
    ins.a = a;
    ins.b = (e->op == ExprOp::Pow) ? e->index : b;
    ins.cval = e->value;
    if (e->op == ExprOp::VarX || e->op == ExprOp::VarZ) ins.a = e->index;
    ins.out = t.slot_count++;
    t.code.push_back(ins);
    slot.emplace(e.get(), ins.out);
    return ins.out;
  };

  for (const auto& e : f) t.f_out.push_back(emit(e));
  for (const auto& e : jx) t.jx_out.push_back(emit(e));
  for (const auto& e : jz) t.jz_out.push_back(emit(e));
  return t;
}

CompiledSystem::Workspace CompiledSystem::make_workspace() const {
  Workspace ws;
  ws.slots.resize(static_cast<size_t>(tape_full_.slot_count));
  ws.f.resize(spec_.n);
  ws.jx.resize(spec_.n, spec_.n);
  ws.jz.resize(spec_.n, spec_.m);
  return ws;
}

bool CompiledSystem::run(const Tape& t, const CVec& x, const CVec& z,
                         Workspace& ws, bool want_jx, bool want_jz) const {
  if (x.size() != spec_.n || z.size() != spec_.m)
    fail(ErrorCode::InvalidArgument, "eval: dimension mismatch");
  if (ws.slots.size() < static_cast<size_t>(t.slot_count))
    ws.slots.resize(static_cast<size_t>(t.slot_count));
  Complex* s = ws.slots.data();
  for (const Instr& ins : t.code) {
    switch (ins.op) {
      case ExprOp::Const: s[ins.out] = ins.cval; break;
      case ExprOp::VarX: s[ins.out] = x[ins.a]; break;
      case ExprOp::VarZ: s[ins.out] = z[ins.a]; break;
      case ExprOp::Add: s[ins.out] = s[ins.a] + s[ins.b]; break;
      case ExprOp::Sub: s[ins.out] = s[ins.a] - s[ins.b]; break;
      case ExprOp::Mul: s[ins.out] = s[ins.a] * s[ins.b]; break;
      case ExprOp::Neg: s[ins.out] = -s[ins.a]; break;
      case ExprOp::Pow: {
        Complex base = s[ins.a];
        Complex r = base;
        for (int k = 1; k < ins.b; ++k) r *= base;
        s[ins.out] = r;
        break;
      }
    }
  }
  bool finite = true;
  const int n = spec_.n, m = spec_.m;
  for (int i = 0; i < n; ++i) {
    ws.f[i] = s[t.f_out[i]];
    finite = finite && is_finite(ws.f[i]);
  }
  if (want_jx) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        ws.jx(i, j) = s[t.jx_out[static_cast<size_t>(i) * n + j]];
        finite = finite && is_finite(ws.jx(i, j));
      }
  }
  if (want_jz) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        ws.jz(i, j) = s[t.jz_out[static_cast<size_t>(i) * m + j]];
        finite = finite && is_finite(ws.jz(i, j));
      }
  }
  return finite;
}

void CompiledSystem::eval(const CVec& x, const CVec& z, Workspace& ws) const {
  if (!run(tape_f_, x, z, ws, false, false))
    fail(ErrorCode::EvaluationOverflow, "non-finite value in system evaluation");
}

void CompiledSystem::eval_with_jx(const CVec& x, const CVec& z, Workspace& ws) const {
  if (!run(tape_fjx_, x, z, ws, true, false))
    fail(ErrorCode::EvaluationOverflow, "non-finite value in Jacobian evaluation");
}

void CompiledSystem::eval_full(const CVec& x, const CVec& z, Workspace& ws) const {
  if (!run(tape_full_, x, z, ws, true, true))
    fail(ErrorCode::EvaluationOverflow, "non-finite value in Jacobian evaluation");
}

bool CompiledSystem::try_eval(const CVec& x, const CVec& z, Workspace& ws) const {
  return run(tape_f_, x, z, ws, false, false);
}

bool CompiledSystem::try_eval_with_jx(const CVec& x, const CVec& z, Workspace& ws) const {
  return run(tape_fjx_, x, z, ws, true, false);
}

bool CompiledSystem::try_eval_full(const CVec& x, const CVec& z, Workspace& ws) const {
  return run(tape_full_, x, z, ws, true, true);
}

CVec eval_system(const CompiledSystem& sys, const CVec& x, const CVec& z) {
  auto ws = sys.make_workspace();
  sys.eval(x, z, ws);
  return ws.f;
}

CMat jacobian_x(const CompiledSystem& sys, const CVec& x, const CVec& z) {
  auto ws = sys.make_workspace();
  sys.eval_with_jx(x, z, ws);
  return ws.jx;
}

CMat jacobian_z(const CompiledSystem& sys, const CVec& x, const CVec& z) {
  auto ws = sys.make_workspace();
  sys.eval_full(x, z, ws);
  return ws.jz;
}

WellConstrainedReport verify_well_constrained(const CompiledSystem& sys,
                                              const SeedPair& seed,
                                              double residual_tol,
                                              double rank_tol) {
  WellConstrainedReport rep;
  rep.residual_tol = residual_tol;
  rep.rank_tol = rank_tol;
  auto ws = sys.make_workspace();
  if (!sys.try_eval_with_jx(seed.x_star, seed.z_star, ws)) return rep;
  rep.residual = inf_norm(ws.f);
  Eigen::JacobiSVD<CMat> svd(ws.jx);
  const auto& sv = svd.singularValues();
  rep.largest_sv = sv.size() ? sv[0] : 0.0;
  rep.smallest_sv = sv.size() ? sv[sv.size() - 1] : 0.0;
  rep.ok = rep.residual <= residual_tol &&
           rep.smallest_sv > rank_tol * rep.largest_sv && rep.largest_sv > 0.0;
  return rep;
}

std::vector<Expr> randomize_square(const std::vector<Expr>& eqs, int n, Rng& rng) {
  const int k = static_cast<int>(eqs.size());
  if (k < n) fail(ErrorCode::InvalidArgument, "randomize_square: fewer equations than target");
  CMat coeff;
  bool ok = false;
  for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
    coeff = rng.cgauss_mat(n, k);
    Eigen::JacobiSVD<CMat> svd(coeff);
    const auto& sv = svd.singularValues();
    ok = sv[sv.size() - 1] > 1e-10 * sv[0];
  }
  if (!ok) fail(ErrorCode::RandomMatrixSingular, "randomize_square: coefficient matrix rank deficient");
  std::vector<Expr> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Expr e = constant(coeff(i, 0)) * eqs[0];
    for (int j = 1; j < k; ++j) e = e + constant(coeff(i, j)) * eqs[j];
    out.push_back(e);
  }
  return out;
}

}  // namespace galmono
