#ifndef TMSIM_GAUSSIAN_HPP
#define TMSIM_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <vector>

#include "tmsim/errors.hpp"

namespace tmsim::gauss {

inline constexpr double k_hbar = 1.054571817e-34; // J s
inline constexpr double k_amu = 1.66053906660e-27; // kg

/// Dimensionless quadrature convention used throughout:
///   xbar = x / (2 dx0),  pbar = p / (2 dp0),  [xbar, pbar] = i/2,
/// so the vacuum variance of every quadrature is 1/4.

/// Squeeze parameter xi = r exp(i 2 theta) for one mode.
struct SqueezeParams {
    double r;     // amplitude, >= 0
    double theta; // phase in radians, stored reduced to [0, 2pi)

    SqueezeParams(double r, double theta);
};

/// Physical trap parameters of one mechanical oscillator mode and the derived
/// ground-state scales used to convert dimensionless quadratures to lab units.
struct OscillatorConfig {
    double mass;        // kg
    double omega;       // rad/s, native trap frequency
    double omega_prime; // rad/s, jumped trap frequency

    OscillatorConfig(double mass, double omega, double omega_prime);

    double dx0() const; // sqrt(hbar / (2 m omega)), m
    double dp0() const; // sqrt(hbar m omega / 2), kg m/s
    double dv0() const; // dp0 / m, m/s
};

/// Mean vector and covariance matrix of N modes in the ordering
/// (xbar_1, pbar_1, xbar_2, pbar_2, ...). Immutable value type: every
/// operation returns a new state.
class GaussianState {
public:
    GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    static GaussianState vacuum(int n_modes);
    static GaussianState thermal(int n_modes, double nbar);

    int mode_count() const { return static_cast<int>(mean_.size()) / 2; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    /// Variance of a single quadrature (index into the 2N vector).
    double variance(int quad_index) const;

private:
    struct unchecked_t {};
    GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov, unchecked_t);

    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;

    friend GaussianState apply_symplectic(const GaussianState&, const Eigen::MatrixXd&);
};

/// Applies a symplectic matrix S to the full quadrature vector:
/// mean -> S mean, cov -> S cov S^T. The input must be 2N x 2N.
GaussianState apply_symplectic(const GaussianState& state, const Eigen::MatrixXd& s);

/// Single-mode squeeze, Heisenberg transform of (xbar, pbar):
///   [ cosh r - sinh r cos 2theta,  -sinh r sin 2theta ]
///   [ -sinh r sin 2theta,          cosh r + sinh r cos 2theta ]
/// At theta = 0 the position variance scales by exp(-2r) and the momentum
/// variance by exp(+2r).
GaussianState apply_squeeze(const GaussianState& state, int mode, const SqueezeParams& params);

/// Free-evolution phase-space rotation of one mode by phi = omega t:
/// xbar -> xbar cos phi + pbar sin phi, pbar -> -xbar sin phi + pbar cos phi.
GaussianState apply_rotation(const GaussianState& state, int mode, double phi);

/// 50/50 beam splitter, xbar_a' = (xbar_a + xbar_b)/sqrt(2),
/// xbar_b' = (-xbar_a + xbar_b)/sqrt(2), identically for pbar.
GaussianState apply_beam_splitter_50_50(const GaussianState& state, int mode_a, int mode_b);

namespace detail {
/// General two-mode mixer by angle alpha (alpha = pi/4 is the public 50/50
/// splitter). Internal; only the 50/50 map is part of the stable API.
GaussianState mode_mixer(const GaussianState& state, int mode_a, int mode_b, double alpha);

/// 2x2 covariance transform matrix of apply_squeeze.
Eigen::Matrix2d squeeze_matrix(const SqueezeParams& params);
Eigen::Matrix2d rotation_matrix(double phi);
} // namespace detail

/// Symplectic eigenvalues of the covariance matrix, ascending. A physical
/// state has every value >= 1/4 in this convention.
std::vector<double> symplectic_eigenvalues(const GaussianState& state);

/// Output momentum uncertainty of the squeezed-pair / beam-splitter circuit:
/// [cosh 2r + sinh 2r cos(tx+ty) cos(tx-ty)]^{1/2} / 2 (dimensionless; multiply
/// by 2 dp0 for physical units).
double momentum_uncertainty_eq2(double r, double theta_x, double theta_y);

/// In-phase single-mode output width [cosh 2r + sinh 2r cos(2 omega t)]^{1/2}/2.
double single_mode_width_vs_time(double r, double omega, double t);

struct SumDiffUncertainty {
    double diff; // Delta(pbar_x' - pbar_y')
    double sum;  // Delta(pbar_x' + pbar_y')
};

/// Closed-form output sum/difference momentum uncertainties as a function of
/// the input squeeze phase theta_x (the partner phase fixed a quarter period
/// away):
///   diff = sqrt(2) (e^{-2r} sin^2 tx + e^{2r} cos^2 tx)^{1/2} / 2
///   sum  = sqrt(2) (e^{-2r} cos^2 tx + e^{2r} sin^2 tx)^{1/2} / 2
SumDiffUncertainty eq3_uncertainties(double r, double theta_x);

/// Inseparability value Var(xbar_a - xbar_b) + Var(pbar_a + pbar_b) computed
/// from the covariance; < 1 certifies the two modes inseparable in this
/// normalization (the commuting EPR-pair combination).
double duan_simon_value(const GaussianState& state, int mode_a, int mode_b);

/// Steering product Delta(xbar_a - xbar_b) * Delta(pbar_a + pbar_b); < 1/4
/// certifies EPR steering.
double epr_product(const GaussianState& state, int mode_a, int mode_b);

/// Operational surrogate used in the experiment: the difference-momentum
/// uncertainty at theta_x = pi/2 (inferring the position difference after a
/// quarter period) times the sum-momentum uncertainty at theta_x = 0.
double epr_product_surrogate(double r);

/// Gaussian Wigner density at a 2N-point:
/// W(z) = exp(-(z-mean)^T cov^{-1} (z-mean)/2) / ((2pi)^N sqrt(det cov)).
double wigner_value(const GaussianState& state, const Eigen::VectorXd& point);

struct GridSpec {
    double a_min, a_max;
    double b_min, b_max;
    int na, nb;
};

struct WignerGrid {
    int axis_a, axis_b;          // quadrature indices
    GridSpec spec;
    Eigen::VectorXd a_coords, b_coords;
    Eigen::MatrixXd values;      // values(i, j) = W(a_coords[i], b_coords[j])
};

/// Marginal Wigner density over two quadratures (all others integrated out),
/// evaluated on a rectangular grid.
WignerGrid wigner_projection(const GaussianState& state, int axis_a, int axis_b,
                             const GridSpec& grid);

} // namespace tmsim::gauss

#endif
