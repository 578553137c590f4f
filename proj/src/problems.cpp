#include "problems.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

namespace galmono {

namespace {

using V3 = Eigen::Vector3cd;
using V4 = Eigen::Vector4cd;
using M3 = Eigen::Matrix3cd;

void require_sample(bool cond, const char* what) {
  if (!cond) fail(ErrorCode::DegenerateSample, what);
}

// complex bilinear forms (no conjugation; these live over C, not R)
Complex cdot3(const V3& a, const V3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

Complex nonzero_cgauss(Rng& rng, double min_abs = 0.2) {
  for (;;) {
    Complex c = rng.cgauss();
    if (std::abs(c) >= min_abs) return c;
  }
}

M3 cross_matrix(const V3& t) {
  M3 m;
  m << Complex(0), -t(2), t(1), t(2), Complex(0), -t(0), -t(1), t(0), Complex(0);
  return m;
}

// complex rotation from a quaternion with q^T q = 1 (bilinear norm)
M3 random_rotation(Rng& rng) {
  for (;;) {
    V4 q;
    for (int i = 0; i < 4; ++i) q(i) = rng.cgauss();
    Complex n2 = q(0) * q(0) + q(1) * q(1) + q(2) * q(2) + q(3) * q(3);
    if (std::abs(n2) < 0.2) continue;
    q /= std::sqrt(n2);
    const Complex w = q(0), x = q(1), y = q(2), z = q(3);
    M3 r;
    r << Complex(1) - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
        2.0 * (x * y + w * z), Complex(1) - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), Complex(1) - 2.0 * (x * x + y * y);
    return r;
  }
}

std::pair<Complex, Complex> affine2(const V3& v) {
  require_sample(std::abs(v(2)) > 1e-3, "projection near infinity");
  return {v(0) / v(2), v(1) / v(2)};
}

// ---------------------------------------------------------------------------
// expression-level 3-vector / 3x3-matrix helpers

using EV3 = std::array<Expr, 3>;
using EM33 = std::array<EV3, 3>;  // rows

EV3 evec(Expr a, Expr b, Expr c) { return {std::move(a), std::move(b), std::move(c)}; }

EV3 const_vec(const V3& v) {
  return evec(constant(v(0)), constant(v(1)), constant(v(2)));
}

EM33 unknown_mat3(int base) {
  EM33 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r][c] = var_x(base + 3 * r + c);
  return m;
}

EV3 unknown_vec3(int base) { return evec(var_x(base), var_x(base + 1), var_x(base + 2)); }

Expr edot(const EV3& a, const EV3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

EV3 emul(const EM33& m, const EV3& v) {
  EV3 r;
  for (int i = 0; i < 3; ++i) r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return r;
}

EV3 eadd(const EV3& a, const EV3& b) { return evec(a[0] + b[0], a[1] + b[1], a[2] + b[2]); }
EV3 esub(const EV3& a, const EV3& b) { return evec(a[0] - b[0], a[1] - b[1], a[2] - b[2]); }
EV3 escale(const Expr& s, const EV3& v) { return evec(s * v[0], s * v[1], s * v[2]); }

EV3 ecross(const EV3& a, const EV3& b) {
  return evec(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
              a[0] * b[1] - a[1] * b[0]);
}

Expr det3_cols(const EV3& c0, const EV3& c1, const EV3& c2) {
  return edot(c0, ecross(c1, c2));
}

Expr det3_mat(const EM33& m) {
  EV3 c0 = evec(m[0][0], m[1][0], m[2][0]);
  EV3 c1 = evec(m[0][1], m[1][1], m[2][1]);
  EV3 c2 = evec(m[0][2], m[1][2], m[2][2]);
  return det3_cols(c0, c1, c2);
}

EM33 emat_transpose(const EM33& m) {
  EM33 t;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) t[r][c] = m[c][r];
  return t;
}

EM33 emat_mul(const EM33& a, const EM33& b) {
  EM33 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return r;
}

EM33 emat_add(const EM33& a, const EM33& b) {
  EM33 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

EM33 emat_sub(const EM33& a, const EM33& b) {
  EM33 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][j] - b[i][j];
  return r;
}

// R^T R - I, upper triangle: six equations selecting the rotation variety
std::vector<Expr> orthogonality_equations(const EM33& r) {
  std::vector<Expr> eqs;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) {
      EV3 ca = evec(r[0][a], r[1][a], r[2][a]);
      EV3 cb = evec(r[0][b], r[1][b], r[2][b]);
      Expr e = edot(ca, cb);
      if (a == b) e = e - constant(1.0);
      eqs.push_back(e);
    }
  return eqs;
}

// ---------------------------------------------------------------------------
// charts for projective unknown blocks

Expr chart_equation(const CVec& coeffs, int base) {
  Expr e = constant(coeffs[0]) * var_x(base);
  for (int i = 1; i < coeffs.size(); ++i) e = e + constant(coeffs[i]) * var_x(base + i);
  return e - constant(1.0);
}

void chart_normalize(Eigen::Ref<CVec> block, const CVec& coeffs) {
  Complex lambda = 0.0;
  for (int i = 0; i < coeffs.size(); ++i) lambda += coeffs[i] * block[i];
  require_sample(std::abs(lambda) > 1e-6, "chart functional vanishes at seed");
  block /= lambda;
}

void pack_mat3(CVec& x, int base, const M3& m) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) x[base + 3 * r + c] = m(r, c);
}

M3 unpack_mat3(const CVec& x, int base) {
  M3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = x[base + 3 * r + c];
  return m;
}

// ---------------------------------------------------------------------------
// toy cubic: x^3 = z

ProblemInstance build_toy_cubic(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 1;
  inst.system.m = 1;
  inst.system.equations = {pow(var_x(0), 3) - var_z(0)};
  // moderate modulus keeps the base point within loop range of the branch
  // point z = 0
  Complex x = nonzero_cgauss(rng, 0.3);
  x *= (0.6 + 0.8 * rng.uniform()) / std::abs(x);
  inst.seed.x_star = CVec::Constant(1, x);
  inst.seed.z_star = CVec::Constant(1, x * x * x);
  return inst;
}

// ---------------------------------------------------------------------------
// P3P (Eq. with the three quadrics) and its full-support relative

ProblemInstance build_p3p(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 3;
  inst.system.m = 6;
  auto x0 = var_x(0), x1 = var_x(1), x2 = var_x(2);
  inst.system.equations = {
      pow(x0, 2) + pow(x1, 2) - var_z(0) * x0 * x1 - var_z(3),
      pow(x0, 2) + pow(x2, 2) - var_z(1) * x0 * x2 - var_z(4),
      pow(x1, 2) + pow(x2, 2) - var_z(2) * x1 * x2 - var_z(5),
  };
  CVec xs = rng.cgauss_vec(3);
  CVec cs = rng.cgauss_vec(3);
  CVec z(6);
  z << cs(0), cs(1), cs(2),
      xs(0) * xs(0) + xs(1) * xs(1) - cs(0) * xs(0) * xs(1),
      xs(0) * xs(0) + xs(2) * xs(2) - cs(1) * xs(0) * xs(2),
      xs(1) * xs(1) + xs(2) * xs(2) - cs(2) * xs(1) * xs(2);
  inst.seed.x_star = xs;
  inst.seed.z_star = z;
  inst.decks.push_back({"sign_flip", [](const CVec& s, const CVec&) { return CVec(-s); }});
  return inst;
}

ProblemInstance build_p3p_generic(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 3;
  inst.system.m = 12;
  auto x0 = var_x(0), x1 = var_x(1), x2 = var_x(2);
  inst.system.equations = {
      var_z(0) * pow(x0, 2) + var_z(1) * pow(x1, 2) + var_z(2) * x0 * x1 + var_z(3),
      var_z(4) * pow(x0, 2) + var_z(5) * pow(x2, 2) + var_z(6) * x0 * x2 + var_z(7),
      var_z(8) * pow(x1, 2) + var_z(9) * pow(x2, 2) + var_z(10) * x1 * x2 + var_z(11),
  };
  CVec xs = rng.cgauss_vec(3);
  CVec lead = rng.cgauss_vec(9);  // A B C E F G I J K
  CVec z(12);
  z << lead(0), lead(1), lead(2),
      -(lead(0) * xs(0) * xs(0) + lead(1) * xs(1) * xs(1) + lead(2) * xs(0) * xs(1)),
      lead(3), lead(4), lead(5),
      -(lead(3) * xs(0) * xs(0) + lead(4) * xs(2) * xs(2) + lead(5) * xs(0) * xs(2)),
      lead(6), lead(7), lead(8),
      -(lead(6) * xs(1) * xs(1) + lead(7) * xs(2) * xs(2) + lead(8) * xs(1) * xs(2));
  inst.seed.x_star = xs;
  inst.seed.z_star = z;
  inst.decks.push_back({"sign_flip", [](const CVec& s, const CVec&) { return CVec(-s); }});
  return inst;
}

// ---------------------------------------------------------------------------
// absolute pose from p point and l line correspondences; rank constraints
// via fixed pairs of maximal minors, falling back to randomized mixes of all
// minors when the fixed choice is rank-deficient at the seed.
//
// parameter layout: per point (Xw0 Xw1 Xw2 u v), then per line
// (N0 N1 N2 N'0 N'1 N'2 e f); planes affine-normalized to last coord 1,
// image lines to (e, f, 1).

ProblemInstance build_abs_pose(Rng& rng, int p, int l, bool randomized_minors) {
  ProblemInstance inst;
  inst.system.n = 12;
  inst.system.m = 5 * p + 8 * l;

  EM33 rot = unknown_mat3(0);
  EV3 t = unknown_vec3(9);
  auto& eqs = inst.system.equations;
  eqs = orthogonality_equations(rot);

  for (int i = 0; i < p; ++i) {
    const int b = 5 * i;
    EV3 wpt = evec(var_z(b), var_z(b + 1), var_z(b + 2));
    Expr u = var_z(b + 3), v = var_z(b + 4);
    EV3 a = eadd(emul(rot, wpt), t);
    Expr m01 = a[0] * v - a[1] * u;
    Expr m02 = a[0] - a[2] * u;
    Expr m12 = a[1] - a[2] * v;
    if (!randomized_minors) {
      eqs.push_back(m02);
      eqs.push_back(m12);
    } else {
      auto mixed = randomize_square({m01, m02, m12}, 2, rng);
      eqs.insert(eqs.end(), mixed.begin(), mixed.end());
    }
  }
  for (int j = 0; j < l; ++j) {
    const int b = 5 * p + 8 * j;
    // columns of the 4x3 incidence matrix
    std::array<Expr, 4> c0 = {var_z(b), var_z(b + 1), var_z(b + 2), constant(1.0)};
    std::array<Expr, 4> c1 = {var_z(b + 3), var_z(b + 4), var_z(b + 5), constant(1.0)};
    Expr e = var_z(b + 6), f = var_z(b + 7);
    std::array<Expr, 4> c2;
    for (int r = 0; r < 3; ++r)
      c2[r] = rot[0][r] * e + rot[1][r] * f + rot[2][r];
    c2[3] = t[0] * e + t[1] * f + t[2];
    auto minor = [&](int r0, int r1, int r2) {
      EV3 a = evec(c0[r0], c0[r1], c0[r2]);
      EV3 bb = evec(c1[r0], c1[r1], c1[r2]);
      EV3 cc = evec(c2[r0], c2[r1], c2[r2]);
      return det3_cols(a, bb, cc);
    };
    Expr m012 = minor(0, 1, 2), m013 = minor(0, 1, 3);
    if (!randomized_minors) {
      eqs.push_back(m012);
      eqs.push_back(m013);
    } else {
      auto mixed = randomize_square({m012, m013, minor(0, 2, 3), minor(1, 2, 3)}, 2, rng);
      eqs.insert(eqs.end(), mixed.begin(), mixed.end());
    }
  }

  // forward sampler
  M3 rn = random_rotation(rng);
  V3 tn;
  for (int i = 0; i < 3; ++i) tn(i) = rng.cgauss();
  CVec z(inst.system.m);
  for (int i = 0; i < p; ++i) {
    V3 wpt;
    for (int r = 0; r < 3; ++r) wpt(r) = rng.cgauss();
    V3 img = rn * wpt + tn;
    auto [u, v] = affine2(img);
    z.segment(5 * i, 5) << wpt(0), wpt(1), wpt(2), u, v;
  }
  for (int j = 0; j < l; ++j) {
    V3 wa, wb;
    for (int r = 0; r < 3; ++r) {
      wa(r) = rng.cgauss();
      wb(r) = rng.cgauss();
    }
    // pencil of planes through the world line
    Eigen::Matrix<Complex, 2, 4> pts;
    pts << wa(0), wa(1), wa(2), Complex(1), wb(0), wb(1), wb(2), Complex(1);
    Eigen::FullPivLU<Eigen::Matrix<Complex, 2, 4>> lu(pts);
    auto kernel = lu.kernel();  // 4 x 2 generically
    require_sample(kernel.cols() == 2, "world line is degenerate");
    V4 plane1 = kernel.col(0) * nonzero_cgauss(rng) + kernel.col(1) * nonzero_cgauss(rng);
    V4 plane2 = kernel.col(0) * nonzero_cgauss(rng) + kernel.col(1) * nonzero_cgauss(rng);
    require_sample(std::abs(plane1(3)) > 1e-3 && std::abs(plane2(3)) > 1e-3,
                   "plane through origin in pencil draw");
    plane1 /= plane1(3);
    plane2 /= plane2(3);
    V3 ia = rn * wa + tn, ib = rn * wb + tn;
    V3 line = ia.cross(ib);  // cross product is bilinear, conjugation-free
    require_sample(std::abs(line(2)) > 1e-3, "image line through origin");
    const int b = 5 * p + 8 * j;
    z.segment(b, 8) << plane1(0), plane1(1), plane1(2), plane2(0), plane2(1),
        plane2(2), line(0) / line(2), line(1) / line(2);
  }
  CVec x(12);
  pack_mat3(x, 0, rn);
  x.segment(9, 3) = tn;
  inst.seed.x_star = x;
  inst.seed.z_star = z;
  return inst;
}

ProblemInstance build_abs_pose_with_fallback(Rng& rng, int p, int l) {
  ProblemInstance inst = build_abs_pose(rng, p, l, false);
  CompiledSystem quick(inst.system);
  if (verify_well_constrained(quick, inst.seed).ok) return inst;
  return build_abs_pose(rng, p, l, true);
}

// ---------------------------------------------------------------------------
// five-point relative pose; unknowns R (9), then the projective block
// (t, a1..a5, b1..b5) dehomogenized by a random chart (or by t^T t = 1 for
// the normalized variant). parameters: five x images then five y images.

DeckMap twisted_pair_deck(int npts, const CVec& chart_coeffs) {
  // chart_coeffs empty means the ||t||^2 = 1 variant: no renormalization
  return {"twisted_pair", [npts, chart_coeffs](const CVec& s, const CVec& z) -> CVec {
            const int block = 3 + 2 * npts;
            M3 r = unpack_mat3(s, 0);
            V3 t = s.segment(9, 3);
            Complex tt = cdot3(t, t);
            if (std::abs(tt) <= 1e-10 * std::pow(inf_norm(s.segment(9, 3)), 2) ||
                std::abs(tt) < 1e-300)
              fail(ErrorCode::DeckUndefined, "twisted pair: t is isotropic");
            M3 rp = (2.0 / tt) * (t * t.transpose()) * r - r;
            CVec out(s.size());
            pack_mat3(out, 0, rp);
            out.segment(9, 3) = t;
            for (int i = 0; i < npts; ++i) {
              V3 xi(z[2 * i], z[2 * i + 1], Complex(1));
              V3 yi(z[2 * npts + 2 * i], z[2 * npts + 2 * i + 1], Complex(1));
              Complex ai = s[12 + i];
              Complex bi = s[12 + npts + i];
              V3 ax = ai * xi, by = bi * yi;
              Complex di = cdot3(by, by) - cdot3(ax, ax);
              if (std::abs(di) < 1e-12)
                fail(ErrorCode::DeckUndefined, "twisted pair: isosceles degeneracy");
              out[12 + i] = -ai * tt / di;
              out[12 + npts + i] = bi * tt / di;
            }
            if (chart_coeffs.size() > 0) {
              chart_normalize(out.segment(9, block), chart_coeffs);
            }
            return out;
          }};
}

ProblemInstance build_five_point(Rng& rng, bool normalized) {
  ProblemInstance inst;
  inst.system.n = 22;
  inst.system.m = 20;

  EM33 rot = unknown_mat3(0);
  EV3 t = unknown_vec3(9);
  auto& eqs = inst.system.equations;
  eqs = orthogonality_equations(rot);
  for (int i = 0; i < 5; ++i) {
    EV3 xi = evec(var_z(2 * i), var_z(2 * i + 1), constant(1.0));
    EV3 yi = evec(var_z(10 + 2 * i), var_z(11 + 2 * i), constant(1.0));
    Expr alpha = var_x(12 + i), beta = var_x(17 + i);
    EV3 lhs = escale(beta, yi);
    EV3 rhs = eadd(emul(rot, escale(alpha, xi)), t);
    for (int c = 0; c < 3; ++c) eqs.push_back(lhs[c] - rhs[c]);
  }
  CVec chart;
  if (normalized) {
    eqs.push_back(edot(t, t) - constant(1.0));
  } else {
    chart = rng.cgauss_vec(13);
    eqs.push_back(chart_equation(chart, 9));
  }

  M3 rn = random_rotation(rng);
  V3 tn;
  for (int i = 0; i < 3; ++i) tn(i) = rng.cgauss();
  CVec z(20), x(22);
  pack_mat3(x, 0, rn);
  x.segment(9, 3) = tn;
  for (int i = 0; i < 5; ++i) {
    Complex u = rng.cgauss(), v = rng.cgauss();
    Complex alpha = nonzero_cgauss(rng);
    V3 xi(u, v, Complex(1));
    V3 w = rn * (alpha * xi) + tn;
    require_sample(std::abs(w(2)) > 1e-3, "second view point near infinity");
    z[2 * i] = u;
    z[2 * i + 1] = v;
    z[10 + 2 * i] = w(0) / w(2);
    z[11 + 2 * i] = w(1) / w(2);
    x[12 + i] = alpha;
    x[17 + i] = w(2);
  }
  if (normalized) {
    Complex tt = cdot3(tn, tn);
    require_sample(std::abs(tt) > 0.05, "translation nearly isotropic");
    x.segment(9, 13) /= std::sqrt(tt);
  } else {
    chart_normalize(x.segment(9, 13), chart);
  }
  inst.seed.x_star = x;
  inst.seed.z_star = z;

  if (normalized) {
    inst.decks.push_back({"negate_pose", [](const CVec& s, const CVec&) {
                            CVec out = s;
                            out.segment(9, 13) = -out.segment(9, 13);
                            return out;
                          }});
  } else {
    inst.decks.push_back(twisted_pair_deck(5, chart));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// essential matrix formulation of the five-point problem: five bilinear
// equations plus three random mixes of the ten cubics cutting out the
// essential variety, plus a chart on E.

ProblemInstance build_essential(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 9;
  inst.system.m = 20;

  EM33 e = unknown_mat3(0);
  std::vector<Expr> eqs;
  for (int i = 0; i < 5; ++i) {
    EV3 xi = evec(var_z(2 * i), var_z(2 * i + 1), constant(1.0));
    EV3 yi = evec(var_z(10 + 2 * i), var_z(11 + 2 * i), constant(1.0));
    eqs.push_back(edot(yi, emul(e, xi)));
  }
  // the ten cubic generators: det E and E E^T E - 1/2 tr(E E^T) E
  std::vector<Expr> cubics;
  cubics.push_back(det3_mat(e));
  EM33 eet = emat_mul(e, emat_transpose(e));
  Expr tr = eet[0][0] + eet[1][1] + eet[2][2];
  EM33 m = emat_mul(eet, e);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      cubics.push_back(m[r][c] - constant(0.5) * tr * e[r][c]);
  auto mixed = randomize_square(cubics, 3, rng);
  eqs.insert(eqs.end(), mixed.begin(), mixed.end());
  CVec chart = rng.cgauss_vec(9);
  eqs.push_back(chart_equation(chart, 0));
  inst.system.equations = std::move(eqs);

  M3 rn = random_rotation(rng);
  V3 tn;
  for (int i = 0; i < 3; ++i) tn(i) = rng.cgauss();
  M3 en = cross_matrix(tn) * rn;
  CVec z(20);
  for (int i = 0; i < 5; ++i) {
    Complex u = rng.cgauss(), v = rng.cgauss();
    V3 xi(u, v, Complex(1));
    V3 g = en * xi;
    require_sample(std::abs(g(1)) > 1e-3, "epipolar line degenerate");
    Complex a = rng.cgauss();
    Complex b = -(a * g(0) + g(2)) / g(1);
    z[2 * i] = u;
    z[2 * i + 1] = v;
    z[10 + 2 * i] = a;
    z[11 + 2 * i] = b;
  }
  CVec x(9);
  pack_mat3(x, 0, en);
  chart_normalize(x.segment(0, 9), chart);
  inst.seed.x_star = x;
  inst.seed.z_star = z;
  return inst;
}

// ---------------------------------------------------------------------------
// four-point homography for calibrated cameras: five-point-style unknowns
// for four points plus the planarity determinant.

DeckMap psi2_deck(const CVec& chart_coeffs) {
  return {"psi2", [chart_coeffs](const CVec& s, const CVec& z) -> CVec {
            M3 r = unpack_mat3(s, 0);
            V3 t = s.segment(9, 3);
            // recover the scene plane <n, X> = d through the four points
            Eigen::Matrix<Complex, 4, 4> rows;
            for (int i = 0; i < 4; ++i) {
              V3 xi(z[2 * i], z[2 * i + 1], Complex(1));
              V3 pt = s[12 + i] * xi;
              rows.row(i) << pt(0), pt(1), pt(2), Complex(-1);
            }
            Eigen::JacobiSVD<CMat> svd(rows, Eigen::ComputeFullV);
            CVec nd = svd.matrixV().col(3);
            V3 n = nd.segment(0, 3);
            Complex d = nd(3);
            Complex nn = cdot3(n, n);
            if (std::abs(nn) < 1e-12)
              fail(ErrorCode::DeckUndefined, "psi2: plane normal is isotropic");
            M3 reflect = (2.0 / nn) * (n * n.transpose()) - M3::Identity();
            M3 rp = r * reflect;
            V3 tp = -t - (2.0 * d / nn) * (r * n);
            CVec out(s.size());
            pack_mat3(out, 0, rp);
            out.segment(9, 3) = tp;
            for (int i = 0; i < 4; ++i) {
              out[12 + i] = s[12 + i];
              out[16 + i] = -s[16 + i];
            }
            chart_normalize(out.segment(9, 11), chart_coeffs);
            return out;
          }};
}

ProblemInstance build_homography_4pt(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 20;
  inst.system.m = 16;

  EM33 rot = unknown_mat3(0);
  EV3 t = unknown_vec3(9);
  auto& eqs = inst.system.equations;
  eqs = orthogonality_equations(rot);
  std::array<EV3, 4> scaled_pts;
  for (int i = 0; i < 4; ++i) {
    EV3 xi = evec(var_z(2 * i), var_z(2 * i + 1), constant(1.0));
    EV3 yi = evec(var_z(8 + 2 * i), var_z(9 + 2 * i), constant(1.0));
    Expr alpha = var_x(12 + i), beta = var_x(16 + i);
    scaled_pts[i] = escale(alpha, xi);
    EV3 lhs = escale(beta, yi);
    EV3 rhs = eadd(emul(rot, scaled_pts[i]), t);
    for (int c = 0; c < 3; ++c) eqs.push_back(lhs[c] - rhs[c]);
  }
  // planarity: det [a1 x1, a2 x2, a3 x3, a4 x4; 1 1 1 1] = 0, expanded
  // along the constant bottom row
  auto minor3 = [&](int skip) {
    std::array<EV3, 3> cols;
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) cols[k++] = scaled_pts[i];
    return det3_cols(cols[0], cols[1], cols[2]);
  };
  eqs.push_back(-minor3(0) + minor3(1) - minor3(2) + minor3(3));
  CVec chart = rng.cgauss_vec(11);
  eqs.push_back(chart_equation(chart, 9));

  M3 rn = random_rotation(rng);
  V3 tn, nrm;
  for (int i = 0; i < 3; ++i) {
    tn(i) = rng.cgauss();
    nrm(i) = rng.cgauss();
  }
  Complex d = nonzero_cgauss(rng);
  Complex nn = cdot3(nrm, nrm);
  require_sample(std::abs(nn) > 0.05, "plane normal nearly isotropic");
  CVec z(16), x(20);
  pack_mat3(x, 0, rn);
  x.segment(9, 3) = tn;
  for (int i = 0; i < 4; ++i) {
    V3 probe;
    for (int r = 0; r < 3; ++r) probe(r) = rng.cgauss();
    V3 pt = probe + ((d - cdot3(nrm, probe)) / nn) * nrm;  // on the plane
    require_sample(std::abs(pt(2)) > 1e-3, "plane point near infinity");
    V3 w = rn * pt + tn;
    require_sample(std::abs(w(2)) > 1e-3, "second view point near infinity");
    z[2 * i] = pt(0) / pt(2);
    z[2 * i + 1] = pt(1) / pt(2);
    z[8 + 2 * i] = w(0) / w(2);
    z[9 + 2 * i] = w(1) / w(2);
    x[12 + i] = pt(2);
    x[16 + i] = w(2);
  }
  chart_normalize(x.segment(9, 11), chart);
  inst.seed.x_star = x;
  inst.seed.z_star = z;
  inst.decks.push_back(twisted_pair_deck(4, chart));
  inst.decks.push_back(psi2_deck(chart));
  return inst;
}

// ---------------------------------------------------------------------------
// the S-matrix reduction of the homography problem: S = H / H11, s = 1/H11^2

ProblemInstance build_homography_smatrix(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 9;
  inst.system.m = 16;

  Expr sv = var_x(0);
  EM33 s_mat = {evec(constant(1.0), var_x(1), var_x(2)),
                evec(var_x(3), var_x(4), var_x(5)),
                evec(var_x(6), var_x(7), var_x(8))};
  std::vector<Expr> eqs;
  EM33 sts = emat_mul(emat_transpose(s_mat), s_mat);
  for (int i = 0; i < 3; ++i) sts[i][i] = sts[i][i] - sv;
  eqs.push_back(det3_mat(sts));
  for (int i = 0; i < 4; ++i) {
    EV3 xi = evec(var_z(2 * i), var_z(2 * i + 1), constant(1.0));
    EV3 yi = evec(var_z(8 + 2 * i), var_z(9 + 2 * i), constant(1.0));
    EV3 c = ecross(xi, emul(s_mat, yi));
    eqs.push_back(c[0]);
    eqs.push_back(c[1]);
  }
  inst.system.equations = std::move(eqs);

  // sample a planar scene; the "x" images take the second-view role so the
  // seed satisfies x ~ S y with S built from H = R + (1/d) t n^T
  M3 rn = random_rotation(rng);
  V3 tn, nrm;
  for (int i = 0; i < 3; ++i) {
    tn(i) = rng.cgauss();
    nrm(i) = rng.cgauss();
  }
  Complex d = nonzero_cgauss(rng);
  Complex nn = cdot3(nrm, nrm);
  require_sample(std::abs(nn) > 0.05, "plane normal nearly isotropic");
  M3 h = rn + (tn * nrm.transpose()) / d;
  require_sample(std::abs(h(0, 0)) > 0.05, "H11 too small for the S chart");
  CVec z(16);
  for (int i = 0; i < 4; ++i) {
    V3 probe;
    for (int r = 0; r < 3; ++r) probe(r) = rng.cgauss();
    V3 pt = probe + ((d - cdot3(nrm, probe)) / nn) * nrm;
    require_sample(std::abs(pt(2)) > 1e-3, "plane point near infinity");
    V3 w = rn * pt + tn;  // = H pt up to the depth scale
    require_sample(std::abs(w(2)) > 1e-3, "second view point near infinity");
    z[2 * i] = w(0) / w(2);      // x image (second view)
    z[2 * i + 1] = w(1) / w(2);
    z[8 + 2 * i] = pt(0) / pt(2);  // y image (first view)
    z[9 + 2 * i] = pt(1) / pt(2);
  }
  CVec x(9);
  x[0] = Complex(1) / (h(0, 0) * h(0, 0));
  M3 s_num = h / h(0, 0);
  x[1] = s_num(0, 1);
  x[2] = s_num(0, 2);
  x[3] = s_num(1, 0);
  x[4] = s_num(1, 1);
  x[5] = s_num(1, 2);
  x[6] = s_num(2, 0);
  x[7] = s_num(2, 1);
  x[8] = s_num(2, 2);
  inst.seed.x_star = x;
  inst.seed.z_star = z;
  return inst;
}

// ---------------------------------------------------------------------------
// three-view compatible homographies (long-running): unknowns H1, H2, D;
// parameters are a rational chart on the collinearity variety so loop
// waypoints stay on it: per view, two free points, the collinearity
// parameter of the third and the fourth point.

Expr resultant_of_quadratics(const Expr& a, const Expr& b, const Expr& c,
                             const Expr& a2, const Expr& b2, const Expr& c2) {
  Expr ac = a * c2 - a2 * c;
  Expr ab = a * b2 - a2 * b;
  Expr bc = b * c2 - b2 * c;
  return ac * ac - ab * bc;
}

ProblemInstance build_three_view_homography(Rng& rng) {
  ProblemInstance inst;
  inst.system.n = 19;
  inst.system.m = 21;

  EM33 h1 = unknown_mat3(0);
  EM33 h2 = unknown_mat3(9);
  Expr dvar = var_x(18);

  auto view_points = [](int base) {
    std::array<EV3, 4> pts;
    pts[0] = evec(var_z(base), var_z(base + 1), constant(1.0));
    pts[1] = evec(var_z(base + 2), var_z(base + 3), constant(1.0));
    Expr lam = var_z(base + 4);
    pts[2] = evec(pts[0][0] + lam * (pts[1][0] - pts[0][0]),
                  pts[0][1] + lam * (pts[1][1] - pts[0][1]), constant(1.0));
    pts[3] = evec(var_z(base + 5), var_z(base + 6), constant(1.0));
    return pts;
  };
  auto xs = view_points(0);
  auto ys = view_points(7);
  auto zs = view_points(14);

  std::vector<Expr> eqs;
  for (int i = 0; i < 4; ++i) {
    EV3 c = ecross(xs[i], emul(h1, ys[i]));
    eqs.push_back(c[0]);
    eqs.push_back(c[1]);
  }
  for (int i = 0; i < 4; ++i) {
    EV3 c = ecross(xs[i], emul(h2, zs[i]));
    eqs.push_back(c[0]);
    eqs.push_back(c[1]);
  }
  eqs.push_back(dvar * det3_mat(h1) - constant(1.0));

  EM33 ident = {evec(constant(1.0), constant(0.0), constant(0.0)),
                evec(constant(0.0), constant(1.0), constant(0.0)),
                evec(constant(0.0), constant(0.0), constant(1.0))};
  EM33 w1 = emat_sub(emat_mul(emat_transpose(h1), h1), ident);
  EM33 w2 = emat_sub(emat_mul(emat_transpose(h2), h2), ident);
  std::vector<Expr> nonlinear = {
      det3_mat(w1), det3_mat(w2), det3_mat(emat_add(w1, w2)),
      det3_mat(emat_sub(w1, w2)),
      resultant_of_quadratics(w1[2][2], constant(-2.0) * w1[0][2], w1[0][0],
                              w2[2][2], constant(-2.0) * w2[0][2], w2[0][0]),
      resultant_of_quadratics(w1[2][2], constant(-2.0) * w1[1][2], w1[1][1],
                              w2[2][2], constant(-2.0) * w2[1][2], w2[1][1])};
  auto mixed = randomize_square(nonlinear, 2, rng);
  eqs.insert(eqs.end(), mixed.begin(), mixed.end());
  inst.system.equations = std::move(eqs);

  // sampler: two calibrated homographies sharing a plane normal; world
  // points 1,2,3 collinear on the plane so every view sees them collinear
  M3 r1 = random_rotation(rng), r2 = random_rotation(rng);
  V3 t1, t2, nrm;
  for (int i = 0; i < 3; ++i) {
    t1(i) = 0.5 * rng.cgauss();
    t2(i) = 0.5 * rng.cgauss();
    nrm(i) = 0.5 * rng.cgauss();
  }
  Complex nn = cdot3(nrm, nrm);
  require_sample(std::abs(nn) > 0.02, "plane normal nearly isotropic");
  M3 h1n = r1 + t1 * nrm.transpose();
  M3 h2n = r2 + t2 * nrm.transpose();
  Complex det1 = h1n.determinant();
  require_sample(std::abs(det1) > 1e-3 && std::abs(h2n.determinant()) > 1e-3,
                 "homography nearly singular");

  auto plane_point = [&](V3 probe) {
    return V3(probe + ((Complex(1) - cdot3(nrm, probe)) / nn) * nrm);
  };
  std::array<V3, 4> world;
  for (int idx : {0, 1, 3}) {
    V3 probe;
    for (int r = 0; r < 3; ++r) probe(r) = rng.cgauss();
    world[idx] = plane_point(probe);
  }
  world[2] = world[0] + nonzero_cgauss(rng) * (world[1] - world[0]);

  Eigen::PartialPivLU<M3> lu1(h1n), lu2(h2n);
  std::array<std::pair<Complex, Complex>, 4> xi, yi, zi;
  for (int i = 0; i < 4; ++i) {
    xi[i] = affine2(world[i]);
    yi[i] = affine2(lu1.solve(world[i]));
    zi[i] = affine2(lu2.solve(world[i]));
  }
  auto collinearity = [&](const std::array<std::pair<Complex, Complex>, 4>& pts) {
    Complex du = pts[1].first - pts[0].first;
    require_sample(std::abs(du) > 1e-6, "view points vertically aligned");
    Complex lam = (pts[2].first - pts[0].first) / du;
    Complex check = pts[0].second + lam * (pts[1].second - pts[0].second);
    require_sample(std::abs(check - pts[2].second) < 1e-8,
                   "collinearity lost in projection");
    return lam;
  };
  CVec z(21);
  auto pack_view = [&](int base, const std::array<std::pair<Complex, Complex>, 4>& pts) {
    z[base] = pts[0].first;
    z[base + 1] = pts[0].second;
    z[base + 2] = pts[1].first;
    z[base + 3] = pts[1].second;
    z[base + 4] = collinearity(pts);
    z[base + 5] = pts[3].first;
    z[base + 6] = pts[3].second;
  };
  pack_view(0, xi);
  pack_view(7, yi);
  pack_view(14, zi);

  CVec x(19);
  pack_mat3(x, 0, h1n);
  pack_mat3(x, 9, h2n);
  x[18] = Complex(1) / det1;
  inst.seed.x_star = x;
  inst.seed.z_star = z;

  auto flip = [](bool f1, bool f2) {
    return [f1, f2](const CVec& s, const CVec&) {
      CVec out = s;
      if (f1) {
        out.segment(0, 9) = -out.segment(0, 9);
        out[18] = -out[18];  // det(-H1) = -det(H1) in odd dimension
      }
      if (f2) out.segment(9, 9) = -out.segment(9, 9);
      return out;
    };
  };
  inst.decks.push_back({"flip_h1", flip(true, false)});
  inst.decks.push_back({"flip_h2", flip(false, true)});
  inst.decks.push_back({"flip_both", flip(true, true)});
  return inst;
}

// ---------------------------------------------------------------------------

ProblemExpected expect(int degree, std::string order, bool all_even,
                       bool primitive, std::vector<std::pair<int, int>> blocks,
                       int deck_order, std::vector<int> deck_invariants,
                       std::string group_name) {
  ProblemExpected e;
  e.degree = degree;
  e.order = std::move(order);
  e.all_even = all_even;
  e.primitive = primitive;
  e.blocks = std::move(blocks);
  e.deck_order = deck_order;
  e.deck_invariants = std::move(deck_invariants);
  e.group_name = std::move(group_name);
  return e;
}

std::vector<Problem> build_catalog() {
  std::vector<Problem> cat;
  cat.emplace_back("toy-cubic", "cyclic cubic x^3 = z", 1, 1, 3,
                   expect(3, "3", true, true, {}, 3, {3}, "C3 (= A3)"),
                   build_toy_cubic);
  cat.emplace_back("p3p", "perspective three-point absolute pose", 3, 6, 8,
                   expect(8, "192", true, false, {{4, 2}}, 2, {2},
                          "S2 wr S4 cap A8"),
                   build_p3p);
  cat.emplace_back("p3p-generic", "full-support family over the P3P monomials",
                   3, 12, 8,
                   expect(8, "384", false, false, {{4, 2}}, 2, {2}, "S2 wr S4"),
                   build_p3p_generic);
  cat.emplace_back("abs-pose-3-0", "absolute pose from 3 points", 12, 15, 8,
                   expect(8, "192", true, false, {{4, 2}}, 2, {2},
                          "S2 wr S4 cap A8"),
                   [](Rng& rng) { return build_abs_pose_with_fallback(rng, 3, 0); });
  cat.emplace_back("abs-pose-2-1", "absolute pose from 2 points and 1 line", 12,
                   18, 4,
                   expect(4, "4", true, false, {{2, 2}, {2, 2}, {2, 2}}, 4,
                          {2, 2}, "S2 wr S2 cap A4 (= C2 x C2)"),
                   [](Rng& rng) { return build_abs_pose_with_fallback(rng, 2, 1); });
  cat.emplace_back("abs-pose-1-2", "absolute pose from 1 point and 2 lines", 12,
                   21, 8,
                   expect(8, "192", true, false, {{4, 2}}, 2, {2},
                          "S2 wr S4 cap A8"),
                   [](Rng& rng) { return build_abs_pose_with_fallback(rng, 1, 2); });
  cat.emplace_back("abs-pose-0-3", "absolute pose from 3 lines", 12, 24, 8,
                   expect(8, "40320", false, true, {}, 1, {}, "S8"),
                   [](Rng& rng) { return build_abs_pose_with_fallback(rng, 0, 3); });
  cat.emplace_back("five-point", "five-point relative pose", 22, 20, 20,
                   expect(20, "1857945600", true, false, {{10, 2}}, 2, {2},
                          "S2 wr S10 cap A20"),
                   [](Rng& rng) { return build_five_point(rng, false); });
  cat.emplace_back("five-point-normalized",
                   "five-point relative pose with |t|^2 = 1", 22, 20, 40,
                   expect(40, "1902536294400", true, false,
                          {{20, 2}, {20, 2}, {20, 2}, {10, 4}}, 4, {2, 2},
                          "(C2)^9 : (S2 wr S10)"),
                   [](Rng& rng) { return build_five_point(rng, true); });
  cat.emplace_back("essential", "essential matrix from five points", 9, 20, 10,
                   expect(10, "3628800", false, true, {}, 1, {}, "S10"),
                   build_essential);
  cat.emplace_back("homography-4pt",
                   "calibrated homography from four planar points", 20, 16, 12,
                   expect(12, "96", true, false,
                          {{6, 2}, {6, 2}, {6, 2}, {3, 4}}, 4, {2, 2},
                          "(C2 x C2) : (S2 wr S3 cap A6)"),
                   build_homography_4pt);
  cat.emplace_back("homography-smatrix",
                   "scaled homography (S, s) eigenvalue formulation", 9, 16, 3,
                   expect(3, "6", false, true, {}, 1, {}, "S3"),
                   build_homography_smatrix);
  cat.emplace_back("three-view-homography",
                   "pair of compatible homographies across three views", 19, 21,
                   64,
                   expect(64, "1472310449111687214661632000", true, false,
                          {{32, 2}, {32, 2}, {32, 2}, {16, 4}}, 4, {2, 2},
                          "S2 wr (S2 wr S16 cap A32) cap A64"),
                   build_three_view_homography, /*long_running=*/true);
  return cat;
}

}  // namespace

const std::vector<Problem>& catalog() {
  static const std::vector<Problem> cat = build_catalog();
  return cat;
}

const Problem* find_problem(const std::string& id) {
  for (const auto& p : catalog())
    if (p.id() == id) return &p;
  return nullptr;
}

const DeckMap* ProblemInstance::find_deck(const std::string& name) const {
  for (const auto& d : decks)
    if (d.name == name) return &d;
  return nullptr;
}

CVec deck_apply(const ProblemInstance& instance, const std::string& name,
                const CVec& solution, const CVec& z) {
  const DeckMap* deck = instance.find_deck(name);
  if (!deck) fail(ErrorCode::InvalidArgument, "unknown deck map: " + name);
  return deck->apply(solution, z);
}

ProblemInstance Problem::make_instance(Rng& rng) const {
  std::string last = "degenerate sample";
  for (int attempt = 0; attempt < 5; ++attempt) {
    ProblemInstance inst;
    try {
      inst = builder_(rng);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateSample) throw;
      last = e.what();
      continue;
    }
    inst.compiled = std::make_shared<CompiledSystem>(inst.system);
    auto ws = inst.compiled->make_workspace();
    if (!inst.compiled->try_eval(inst.seed.x_star, inst.seed.z_star, ws)) {
      last = "seed evaluation overflow";
      continue;
    }
    if (inf_norm(ws.f) > 1e-12) {
      last = "raw seed residual above 1e-12";
      continue;
    }
    NewtonOutcome polish = newton_correct(*inst.compiled, inst.seed.x_star,
                                          inst.seed.z_star, 1e-12, 4);
    if (polish.ok()) inst.seed.x_star = polish.x;
    auto rep = verify_well_constrained(*inst.compiled, inst.seed);
    if (!rep.ok) {
      last = "seed fails the well-constrained check";
      continue;
    }
    return inst;
  }
  fail(ErrorCode::DegenerateSample, id_ + ": " + last);
}

}  // namespace galmono
