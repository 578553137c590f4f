#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace galmono {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class ErrorCode {
  EvaluationOverflow,
  RandomMatrixSingular,
  SingularJacobian,
  FiberIncomplete,
  AmbiguousMatch,
  TooManyDiscards,
  DeckUndefined,
  DeckImageUnmatched,
  DeckResidualLarge,
  NotTransitive,
  DegreeTooLarge,
  DegenerateSample,
  UnknownProblem,
  NeedsAllowLong,
  InvalidArgument,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline bool is_finite(const Complex& c) {
  return std::isfinite(c.real()) && std::isfinite(c.imag());
}

inline bool is_finite(const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!is_finite(v[i])) return false;
  return true;
}

inline bool is_finite(const CMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!is_finite(m(i, j))) return false;
  return true;
}

inline double inf_norm(const CVec& v) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) r = std::max(r, std::abs(v[i]));
  return r;
}

}  // namespace galmono
