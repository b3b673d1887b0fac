#ifndef TMSIM_FIT_HPP
#define TMSIM_FIT_HPP

#include <Eigen/Dense>
#include <functional>

#include "tmsim/errors.hpp"

namespace tmsim::fit {

/// Model callback: given parameters, fill the predicted values and (optionally)
/// the Jacobian d f_i / d p_j at every sample point.
using ModelFn = std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& values,
                                   Eigen::MatrixXd* jacobian)>;

struct LmOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-10; // on max |J^T resid|
    double step_tol = 1e-14;     // on relative parameter change
    double lambda0 = 1e-3;
};

struct LmResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^{-1}, s^2 = SSR / (n - p)
    Eigen::VectorXd std_errors;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of
/// |y - f(params)|^2. Throws FitFailure when the iteration limit is reached
/// without meeting the gradient tolerance.
LmResult lm_fit(const ModelFn& model, const Eigen::VectorXd& y, const Eigen::VectorXd& p0,
                const LmOptions& options = {});

struct GaussianPeakFit {
    double amplitude, center, sigma, offset;
    Eigen::Matrix4d covariance;
    Eigen::Vector4d std_errors;
    double residual_norm;
    int iterations;
};

/// 4-parameter Gaussian A exp(-(x-c)^2 / (2 sigma^2)) + b. Throws
/// InvalidDataError on flat data, FitFailure on non-convergence.
GaussianPeakFit fit_gaussian_peak(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct DecayingSinusoidFit {
    double baseline;         // c0
    double osc_amplitude;    // c1
    double transient_offset; // c2
    double decay_time;       // 1/e time of the Gaussian envelope exp(-(t/tau)^2)
    double angular_freq;
    double phase;
    double residual_norm;
    int iterations;
};

/// Fits c0 + exp(-(t/tau_d)^2) (c2 + c1 cos(omega t + phi)). Initial angular
/// frequency must be supplied (the grid is assumed to resolve it).
DecayingSinusoidFit fit_decaying_sinusoid(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                                          double omega_guess);

} // namespace tmsim::fit

#endif
