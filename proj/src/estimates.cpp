#include "dbar/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dbar/parallel.hpp"
#include "dbar/transforms.hpp"

namespace dbar {

namespace {

using std::numbers::pi;

Rational inv(const Rational& q) { return Rational(1) / q; }

void require_nonnegative(const ScalarField& f, const char* who) {
  for (const cplx& v : f.values())
    if (v.imag() != 0.0 || v.real() < 0.0)
      throw std::invalid_argument(std::string(who) +
                                  ": inputs must be real and nonnegative");
}

void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* who) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(who) + ": fields on different grids");
}

// max(Re f, 0)^e; clamps the rounding-level negatives of FFT convolutions.
ScalarField real_power(const ScalarField& f, double e) {
  std::vector<cplx> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::pow(std::max(f[i].real(), 0.0), e);
  return ScalarField(f.grid(), std::move(v));
}

ScalarField modulus(const ScalarField& f) {
  std::vector<cplx> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(f[i]);
  return ScalarField(f.grid(), std::move(v));
}

} // namespace

double to_double(const Rational& q) { return q.convert_to<double>(); }

ExponentSequence::ExponentSequence(int jmax) : jmax_(jmax) {
  if (jmax < 1)
    throw std::invalid_argument("exponent_sequence: jmax must be >= 1");
  p_.push_back(2);
  s_.push_back(4);
  for (int j = 0; j <= jmax; ++j) {
    r_.push_back(Rational(3) * p_[j] / 4);
    if (j == jmax) break;
    p_.push_back(inv(inv(p_[j]) - inv(2 * r_[j])));
    s_.push_back(inv(inv(s_[j]) + inv(2 * r_[j])));
  }
  s_tilde_.push_back(0); // unused slot for j = 0
  for (int j = 1; j <= jmax; ++j) s_tilde_.push_back(inv(inv(s_[j]) - Rational(1, 2)));
}

Rational ExponentSequence::r_prime(int j) const {
  return r(j) / (r(j) - 1);
}

const Rational& ExponentSequence::s_tilde(int j) const {
  if (j < 1 || j > jmax_)
    throw std::out_of_range("s_tilde: index must be in [1, jmax]");
  return s_tilde_[j];
}

std::vector<std::string> ExponentSequence::violated_identities() const {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& name, int j) {
    if (!ok) bad.push_back(name + " at j=" + std::to_string(j));
  };
  check(p_[0] == 2, "p_0 = 2", 0);
  check(s_[0] == 4, "s_0 = 4", 0);
  for (int j = 0; j <= jmax_; ++j) {
    check(inv(r_[j]) == Rational(4) / (3 * p_[j]), "1/r = 4/(3p)", j);
    check(p_[j] / r_[j] == Rational(4, 3), "p/r = 4/3", j);
    check(inv(p_[j]) + inv(s_[j]) == Rational(3, 4), "1/p + 1/s = 3/4", j);
    check(s_[j] / r_prime(j) == Rational(4, 3), "s/r' = 4/3", j);
    if (j >= 1) {
      check(s_[j] < 2, "s < 2", j);
      check(s_[j] < s_[j - 1], "s decreasing", j);
      check(s_[j] > Rational(4, 3), "s > 4/3", j);
      check(inv(s_tilde_[j]) == inv(s_[j]) - Rational(1, 2), "1/s~ = 1/s - 1/2", j);
    }
    if (j < jmax_) {
      check(inv(p_[j + 1]) == inv(p_[j]) - inv(2 * r_[j]), "p recurrence", j);
      check(inv(s_[j + 1]) == inv(s_[j]) + inv(2 * r_[j]), "s recurrence", j);
    }
  }
  return bad;
}

ExponentSequence exponent_sequence(int jmax) { return ExponentSequence(jmax); }

double brute_force_Ik(const ScalarField& t, const std::vector<ScalarField>& qs,
                      int k) {
  if (k < 0 || k > 2)
    throw std::invalid_argument("brute_force_Ik: k must be 0, 1 or 2");
  if (qs.size() != static_cast<std::size_t>(2 * k + 1))
    throw std::invalid_argument("brute_force_Ik: need 2k+1 fields q_j");
  const GridSpec& g = t.grid();
  const int n = g.n();
  if ((k == 1 && n > 16) || (k == 2 && n > 8))
    throw std::invalid_argument("brute_force_Ik: grid too large for k");
  require_nonnegative(t, "brute_force_Ik");
  for (const ScalarField& q : qs) {
    require_same_grid(t, q, "brute_force_Ik");
    require_nonnegative(q, "brute_force_Ik");
  }

  const double h = g.spacing();
  const int w = 2 * n - 1;
  std::vector<double> kernel(static_cast<std::size_t>(w) * w);
  const double self = h * riesz_unit_cell_integral() / (h * h);
  for (int a = -(n - 1); a < n; ++a)
    for (int b = -(n - 1); b < n; ++b)
      kernel[(a + n - 1) * w + (b + n - 1)] =
          (a == 0 && b == 0) ? self : 1.0 / (h * std::hypot(a, b));
  auto K = [&](int a, int b) { return kernel[(a + n - 1) * w + (b + n - 1)]; };

  const std::size_t size = g.size();
  std::vector<double> tv(size);
  std::vector<std::vector<double>> qv(qs.size(), std::vector<double>(size));
  for (std::size_t i = 0; i < size; ++i) {
    tv[i] = t[i].real();
    for (std::size_t l = 0; l < qs.size(); ++l) qv[l][i] = qs[l][i].real();
  }
  const int levels = 2 * k + 1;

  // The alternating sum of an odd number of cell centres is the cell centre
  // with index j_0 - j_1 + j_2 - ...; it lies on the grid iff that index does.
  auto recurse = [&](auto&& self_fn, int level, int pj, int pk, int sj,
                     int sk, double weight) -> double {
    if (level == levels) {
      if (sj < 0 || sj >= n || sk < 0 || sk >= n) return 0.0;
      return weight * tv[g.index(sj, sk)];
    }
    const double sign = (level % 2 == 0) ? 1.0 : -1.0;
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk) {
        const double q = qv[level][g.index(j, kk)];
        if (q == 0.0) continue;
        acc += self_fn(self_fn, level + 1, j, kk,
                       sj + static_cast<int>(sign) * j,
                       sk + static_cast<int>(sign) * kk,
                       weight * q * K(pj - j, pk - kk));
      }
    return acc;
  };

  std::vector<double> partial(size, 0.0);
  parallel_for(size, [&](std::size_t i0) {
    const double q0 = qv[0][i0];
    if (q0 == 0.0) return;
    const int j0 = static_cast<int>(i0) / n, k0 = static_cast<int>(i0) % n;
    partial[i0] = recurse(recurse, 1, j0, k0, j0, k0, q0);
  });
  double sum = 0.0;
  for (double v : partial) sum += v;
  return std::pow(g.cell_area(), levels) * sum;
}

InductiveStep inductive_step(const ScalarField& t, const ScalarField& q0,
                             const ScalarField& q1, int j) {
  require_same_grid(t, q0, "inductive_step");
  require_same_grid(t, q1, "inductive_step");
  require_nonnegative(t, "inductive_step");
  require_nonnegative(q0, "inductive_step");
  require_nonnegative(q1, "inductive_step");
  const ExponentSequence seq(std::max(j, 1));
  const double r = to_double(seq.r(j));
  const double rp = to_double(seq.r_prime(j));
  ScalarField t1 = real_power(riesz_potential(real_power(t, r)), 1.0 / r);
  ScalarField inner = real_power(riesz_potential(real_power(q0, rp)), 1.0 / rp);
  ScalarField q2 = real_power(riesz_potential(q1 * inner), 1.0);
  return {std::move(t1), std::move(q2)};
}

StepContracts step_contracts(const ScalarField& t, const ScalarField& q0,
                             const ScalarField& q1, int j,
                             double hls_constant) {
  const InductiveStep step = inductive_step(t, q0, q1, j);
  const ExponentSequence seq(j + 1);
  const double r = to_double(seq.r(j));
  const double rp = to_double(seq.r_prime(j));
  const double pj = to_double(seq.p(j)), pj1 = to_double(seq.p(j + 1));
  const double sj = to_double(seq.s(j)), sj1 = to_double(seq.s(j + 1));
  const double st1 = to_double(seq.s_tilde(j + 1));

  const ScalarField g =
      q1 * real_power(riesz_potential(real_power(q0, rp)), 1.0 / rp);
  const double g_norm = lp_norm(g, sj1);
  const double alpha = g_norm == 0.0 ? 0.0 : lp_norm(step.q2_tilde, st1) / g_norm;

  StepContracts c{};
  c.t1_norm = lp_norm(step.t1, pj1);
  c.t1_bound = std::pow(hls_constant, 1.0 / r) * lp_norm(t, pj);
  c.q2_norm = lp_norm(step.q2_tilde, st1);
  c.q2_bound = std::pow(hls_constant, 1.0 / rp) * alpha * lp_norm(q1, 2.0) *
               lp_norm(q0, sj);
  c.alpha = alpha;
  return c;
}

double hls_ratio(const ScalarField& f, double p) {
  if (!(p > 1.0 && p < 2.0))
    throw std::invalid_argument("hls_ratio: p must lie in (1, 2)");
  const double fp = lp_norm(f, p);
  if (fp == 0.0) return 0.0;
  const double p_tilde = 1.0 / (1.0 / p - 0.5);
  return lp_norm(riesz_potential(modulus(f)), p_tilde) / fp;
}

double sharp_hls_constant() { return 2.0 * std::sqrt(pi); }

double multilinear_constant(const ScalarField& t, const ScalarField& q0,
                       const ScalarField& q1, const ScalarField& q2) {
  const double denom = lp_norm(t, 2.0) * lp_norm(q0, 2.0) * lp_norm(q1, 2.0) *
                       lp_norm(q2, 2.0);
  if (denom == 0.0) return 0.0;
  return brute_force_Ik(t, {q0, q1, q2}, 1) / denom;
}

} // namespace dbar
