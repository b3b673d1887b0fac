#ifndef TMSIM_FOCK_HPP
#define TMSIM_FOCK_HPP

#include <Eigen/Dense>
#include <iosfwd>

#include "tmsim/errors.hpp"

namespace tmsim::fock {

/// Default bound on acceptable probability mass lost to truncation.
inline constexpr double k_default_truncation_gate = 1e-3;

/// Truncated joint phonon-number table P(n_x', n_y').
struct FockDistribution {
    Eigen::MatrixXd probs;        // (n_max+1) x (n_max+1), probs(nx, ny)
    double truncation_mass = 0.0; // 1 - sum(probs)
    bool truncation_warning = false;

    int n_max() const { return static_cast<int>(probs.rows()) - 1; }

    /// Marginal over the other axis; axis 0 = x', axis 1 = y'.
    Eigen::VectorXd marginal(int axis) const;

    /// Joint table of two independent 1-D distributions.
    static FockDistribution from_product(const Eigen::VectorXd& px, const Eigen::VectorXd& py);
};

/// 1-D phonon-number distribution with truncation bookkeeping.
struct FockMarginal {
    Eigen::VectorXd probs;
    double truncation_mass = 0.0;
};

/// Two-mode squeeze operation S2 = exp(r (a_x a_y - a_x^+ a_y^+)) with an
/// initial relative phase theta0 (only coherences depend on theta0; the
/// probability tables computed here do not) and the cap l_max on the
/// initial-occupation sums of thermal weighting.
struct TwoModeSqueezeOp {
    double r;
    double theta0 = 0.0;
    int l_max = 50;

    TwoModeSqueezeOp(double r, double theta0 = 0.0, int l_max = 50);
};

/// Two-mode squeezed vacuum: P(n,n) = sech^2 r tanh^{2n} r, zero off-diagonal.
FockDistribution tmsv_probabilities(double r, int n_max);

/// Single-mode squeezed vacuum: P(2m) = (2m)!/(2^m m!)^2 tanh^{2m} r / cosh r,
/// odd entries exactly zero.
FockMarginal smsv_probabilities(double r, int n_max);

/// Squared matrix element |<n_x, n_y| S2(r) |l_x, l_y>|^2. Zero unless
/// l_x - n_x = l_y - n_y. Closed form:
///   tanh^{2(l_x-n_x)} r / cosh^{2(n_x+n_y+1)} r *
///   | sum_g (-sinh^2 r)^g sqrt(C(n_x,g) C(n_y,g) C(l_x,d+g) C(l_y,d+g)) |^2
/// with d = l_x - n_x and g over [0, min(n_x, n_y)].
double s2_matrix_element_sq(int n_x, int n_y, int l_x, int l_y, double r);

/// Dense numerical exponential of the truncated generator
/// r (a_x a_y - a_x^+ a_y^+) on a dim^2 Fock basis. Independent verification
/// oracle for s2_matrix_element_sq; entries converge only well below the
/// truncation edge. dim > 40 raises a resource-limit error.
Eigen::MatrixXd s2_oracle(double r, int dim);

/// High-accuracy oracle exploiting the conserved occupation difference
/// q = n_y - n_x: within one sector the generator is tridiagonal, so hundreds
/// of rungs are affordable and truncation error is pushed below 1e-10 for
/// small indices. Returns the (n_rungs+1)^2 table of squared amplitudes
/// |<n, n+q| S2(r) |l, l+q>|^2 indexed by (n, l).
Eigen::MatrixXd s2_oracle_sector(double r, int q, int n_rungs);

/// Initial-occupation-averaged table: Boltzmann weights with mean nbar0 summed
/// against the squared S2 matrix elements, initial occupations capped at
/// l_x + l_y <= op.l_max. Sets truncation_warning when the neglected Boltzmann
/// tail is not negligible.
FockDistribution thermal_weighted_distribution(const TwoModeSqueezeOp& op, double nbar0,
                                               int n_max);

enum class Axis { X = 0, Y = 1 };

struct PhononStats {
    double mean;
    double variance;
};

/// Marginal phonon-number mean and variance along one axis. The distribution
/// must satisfy the truncation gate.
PhononStats phonon_stats(const FockDistribution& dist, Axis axis,
                         double gate = k_default_truncation_gate);
PhononStats phonon_stats(const Eigen::VectorXd& marginal);

/// Phonon-number distribution of a zero-mean single-mode Gaussian state with
/// quadrature covariance eigenvalues v1, v2 (vacuum = 1/4, 1/4). Independent
/// of the Fock-space machinery above; exact negative-binomial convolution
/// derived from the generating function
///   sum_n P(n) eta^n = 2 / sqrt((A1 - B1 eta)(A2 - B2 eta)),
/// A_i = 4 v_i + 1, B_i = 4 v_i - 1.
Eigen::VectorXd phonon_distribution_from_cov(double v1, double v2, int n_max);
Eigen::VectorXd phonon_distribution_from_cov(const Eigen::Matrix2d& cov, int n_max);

/// CSV export: header row of n_y' indices, one row per n_x'.
void write_csv(const FockDistribution& dist, std::ostream& os);

} // namespace tmsim::fock

#endif
