#pragma once

#include <memory>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace galmono {

// Immutable expression DAG over unknowns x_i, parameters z_j and complex
// constants. Subterms are shared; differentiation is structural and the
// results are compiled once into a flat evaluation tape.

enum class ExprOp : uint8_t { Const, VarX, VarZ, Add, Sub, Mul, Neg, Pow };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  Complex value{};  // Const
  int index = 0;    // variable index, or Pow exponent
  Expr a, b;
};

Expr constant(const Complex& c);
Expr constant(double c);
Expr var_x(int i);
Expr var_z(int i);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, int k);

inline Expr operator+(const Expr& a, const Complex& c) { return a + constant(c); }
inline Expr operator-(const Expr& a, const Complex& c) { return a - constant(c); }
inline Expr operator*(const Complex& c, const Expr& a) { return constant(c) * a; }
inline Expr operator*(const Expr& a, const Complex& c) { return constant(c) * a; }

/// Partial derivative with respect to x_i (wrt_x) or z_i.
Expr diff(const Expr& e, bool wrt_x, int index);

/// A square parametric polynomial system F(x; z) with n unknowns and m
/// parameters.
struct SystemSpec {
  int n = 0;
  int m = 0;
  std::vector<Expr> equations;

  /// Throws InvalidArgument unless the system is square and every expression
  /// references only declared symbols.
  void validate() const;
};

struct SeedPair {
  CVec x_star;
  CVec z_star;
};

// Flat tape evaluation. A CompiledSystem owns three tapes (F; F with d_x F;
// F with both Jacobians) sharing one scratch layout, so callers pick the
// cheapest one for the job. Evaluation writes only into the caller's
// workspace and is reentrant.
class CompiledSystem {
public:
  explicit CompiledSystem(SystemSpec spec);

  const SystemSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  int m() const { return spec_.m; }

  struct Workspace {
    std::vector<Complex> slots;
    CVec f;
    CMat jx;
    CMat jz;
  };

  Workspace make_workspace() const;

  /// Residuals only. Throws EvaluationOverflow on non-finite output.
  void eval(const CVec& x, const CVec& z, Workspace& ws) const;
  /// Residuals and d_x F.
  void eval_with_jx(const CVec& x, const CVec& z, Workspace& ws) const;
  /// Residuals, d_x F and d_z F.
  void eval_full(const CVec& x, const CVec& z, Workspace& ws) const;

  /// Non-throwing variants used inside the tracker; return false on
  /// non-finite values.
  bool try_eval(const CVec& x, const CVec& z, Workspace& ws) const;
  bool try_eval_with_jx(const CVec& x, const CVec& z, Workspace& ws) const;
  bool try_eval_full(const CVec& x, const CVec& z, Workspace& ws) const;

private:
  struct Instr {
    ExprOp op;
    int a = -1;
    int b = -1;  // Pow exponent for Pow
    int out = -1;
    Complex cval{};
  };
  struct Tape {
    std::vector<Instr> code;
    int slot_count = 0;
    std::vector<int> f_out;   // n
    std::vector<int> jx_out;  // n*n (row major) or empty
    std::vector<int> jz_out;  // n*m (row major) or empty
  };

  static Tape build_tape(const std::vector<Expr>& f,
                         const std::vector<Expr>& jx,
                         const std::vector<Expr>& jz, int n, int m);
  bool run(const Tape& t, const CVec& x, const CVec& z, Workspace& ws,
           bool want_jx, bool want_jz) const;

  SystemSpec spec_;
  std::vector<Expr> jx_exprs_;  // n*n row major
  std::vector<Expr> jz_exprs_;  // n*m row major
  Tape tape_f_, tape_fjx_, tape_full_;
};

/// Convenience wrappers around a workspace-owning evaluation.
CVec eval_system(const CompiledSystem& sys, const CVec& x, const CVec& z);
CMat jacobian_x(const CompiledSystem& sys, const CVec& x, const CVec& z);
CMat jacobian_z(const CompiledSystem& sys, const CVec& x, const CVec& z);

struct WellConstrainedReport {
  bool ok = false;
  double residual = 0.0;      // ||F(x*,z*)||_inf
  double smallest_sv = 0.0;   // of d_x F
  double largest_sv = 0.0;
  double residual_tol = 0.0;
  double rank_tol = 0.0;
};

/// Checks the SeedPair invariants: residual below tolerance and d_x F of
/// full numerical rank (smallest singular value above rank_tol relative to
/// the largest).
WellConstrainedReport verify_well_constrained(const CompiledSystem& sys,
                                              const SeedPair& seed,
                                              double residual_tol = 1e-10,
                                              double rank_tol = 1e-8);

/// Mixes k >= n input equations into n random complex linear combinations.
/// Any common zero of the inputs stays a zero of the output. Redraws a
/// rank-deficient coefficient matrix up to 3 times before failing with
/// RandomMatrixSingular.
std::vector<Expr> randomize_square(const std::vector<Expr>& eqs, int n,
                                   Rng& rng);

}  // namespace galmono
