#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

using Rational = boost::multiprecision::cpp_rational;

/// Exponents of the multilinear estimates, exact:
///   p_0 = 2, s_0 = 4, 1/r_j = 4/(3 p_j),
///   1/p_{j+1} = 1/p_j - 1/(2 r_j), 1/s_{j+1} = 1/s_j + 1/(2 r_j),
///   1/s~_j = 1/s_j - 1/2 (j >= 1), r'_j = r_j / (r_j - 1).
class ExponentSequence {
public:
  explicit ExponentSequence(int jmax);

  int jmax() const { return jmax_; }
  const Rational& p(int j) const { return p_.at(j); }
  const Rational& s(int j) const { return s_.at(j); }
  const Rational& r(int j) const { return r_.at(j); }
  Rational r_prime(int j) const;
  /// Defined for 1 <= j <= jmax.
  const Rational& s_tilde(int j) const;

  /// Names of every identity that fails in exact arithmetic; empty when all
  /// hold.
  std::vector<std::string> violated_identities() const;

private:
  int jmax_;
  std::vector<Rational> p_, s_, r_, s_tilde_;
};

ExponentSequence exponent_sequence(int jmax);

double to_double(const Rational& q);

/// I_k(t, q_0..q_{2k}) = h^{2(2k+1)} sum t(x_0 - x_1 + ... + x_{2k})
///   q_0(x_0)...q_{2k}(x_{2k}) / (|x_0 - x_1| ... |x_{2k-1} - x_{2k}|)
/// over all lattice (2k+1)-tuples. Coincident points use the cell-averaged
/// kernel self_weight / h^2 of riesz_potential; t vanishes off the grid.
/// Inputs must be real and nonnegative; k <= 2 with n <= 16 (k = 1) or
/// n <= 8 (k = 2). Throws std::invalid_argument otherwise.
double brute_force_Ik(const ScalarField& t, const std::vector<ScalarField>& qs,
                      int k);

struct InductiveStep {
  ScalarField t1;       ///< [R(t^{r_j})]^{1/r_j}
  ScalarField q2_tilde; ///< R(q1 [R(q0^{r'_j})]^{1/r'_j})
};

/// One Hoelder/HLS reduction step with exponent r_j. Inputs must be real and
/// nonnegative.
InductiveStep inductive_step(const ScalarField& t, const ScalarField& q0,
                             const ScalarField& q1, int j);

/// Norm contracts of one inductive step, measured against the HLS constant
/// `hls_constant` at the (4/3, 4) pair:
///   ||t1||_{p_{j+1}} <= C^{1/r_j} ||t||_{p_j},
///   ||q2~||_{s~_{j+1}} <= C^{1/r'_j} alpha ||q1||_2 ||q0||_{s_j},
/// with alpha the measured HLS ratio of q1 [R(q0^{r'})]^{1/r'} at s_{j+1}.
struct StepContracts {
  double t1_norm, t1_bound;
  double q2_norm, q2_bound;
  double alpha;
};

StepContracts step_contracts(const ScalarField& t, const ScalarField& q0,
                             const ScalarField& q1, int j,
                             double hls_constant);

/// ||R|f|||_{p~} / ||f||_p with 1/p~ = 1/p - 1/2. Requires 1 < p < 2.
double hls_ratio(const ScalarField& f, double p);

/// Sharp HLS constant for ||R f||_4 <= C ||f||_{4/3} in the plane,
/// attained by (1 + |x|^2)^{-3/2}.
double sharp_hls_constant();

/// I_1 / (||t||_2 ||q0||_2 ||q1||_2 ||q2||_2).
double multilinear_constant(const ScalarField& t, const ScalarField& q0,
                       const ScalarField& q1, const ScalarField& q2);

} // namespace dbar
