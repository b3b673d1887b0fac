#include "tmsim/fit.hpp"

#include <cmath>

namespace tmsim::fit {

LmResult lm_fit(const ModelFn& model, const Eigen::VectorXd& y, const Eigen::VectorXd& p0,
                const LmOptions& options) {
    const auto n = y.size();
    const auto np = p0.size();
    if (n <= np)
        throw InvalidDataError("lm_fit: need more samples than parameters");

    Eigen::VectorXd params = p0;
    Eigen::VectorXd values(n);
    Eigen::MatrixXd jac(n, np);

    model(params, values, &jac);
    Eigen::VectorXd resid = y - values;
    double chi2 = resid.squaredNorm();

    double lambda = options.lambda0;
    int iter = 0;
    bool converged = false;
    for (; iter < options.max_iterations; ++iter) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * resid;
        if (g.cwiseAbs().maxCoeff() < options.gradient_tol) {
            converged = true;
            break;
        }
        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
            const Eigen::VectorXd step = damped.ldlt().solve(g);
            const Eigen::VectorXd trial = params + step;
            Eigen::VectorXd trial_values(n);
            model(trial, trial_values, nullptr);
            const double trial_chi2 = (y - trial_values).squaredNorm();
            if (std::isfinite(trial_chi2) && trial_chi2 <= chi2) {
                const double rel_step = step.norm() / std::max(params.norm(), 1e-300);
                params = trial;
                chi2 = trial_chi2;
                lambda = std::max(lambda / 3.0, 1e-14);
                model(params, values, &jac);
                resid = y - values;
                stepped = true;
                if (rel_step < options.step_tol) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (converged) break;
        if (!stepped) {
            // Damping saturated: accept the current point as a (local) optimum
            // if the gradient is small on the problem's own scale.
            const double gscale = jac.colwise().norm().maxCoeff() * std::sqrt(chi2);
            if (g.cwiseAbs().maxCoeff() < 1e-10 * std::max(gscale, 1.0)) {
                converged = true;
                break;
            }
            throw FitFailure("lm_fit: damping saturated without progress", std::sqrt(chi2), iter);
        }
    }
    if (!converged)
        throw FitFailure("lm_fit: iteration limit reached", std::sqrt(chi2), iter);

    LmResult out;
    out.params = params;
    out.residual_norm = std::sqrt(chi2);
    out.iterations = iter;
    out.converged = true;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const double s2 = chi2 / static_cast<double>(n - np);
    out.covariance = s2 * jtj.ldlt().solve(Eigen::MatrixXd::Identity(np, np));
    out.std_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

GaussianPeakFit fit_gaussian_peak(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const auto n = x.size();
    if (n != y.size())
        throw std::invalid_argument("fit_gaussian_peak: x/y size mismatch");
    if (n < 8)
        throw InvalidDataError("fit_gaussian_peak: need at least 8 points");
    const double ymin = y.minCoeff();
    const double ymax = y.maxCoeff();
    if (!(ymax - ymin > 0.0))
        throw InvalidDataError("fit_gaussian_peak: data has zero variance");

    // Moment-based starting point.
    Eigen::Index imax;
    y.maxCoeff(&imax);
    double w_sum = 0.0, c0 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::max(y[i] - ymin, 0.0);
        w_sum += w;
        c0 += w * x[i];
    }
    c0 /= std::max(w_sum, 1e-300);
    double m2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        m2 += std::max(y[i] - ymin, 0.0) * (x[i] - c0) * (x[i] - c0);
    double s0 = std::sqrt(m2 / std::max(w_sum, 1e-300));
    const double span = x.maxCoeff() - x.minCoeff();
    if (!(s0 > 0.0) || !std::isfinite(s0)) s0 = span / 6.0;
    s0 = std::clamp(s0, span * 1e-3, span);

    Eigen::VectorXd p0(4);
    p0 << ymax - ymin, c0, s0, ymin;

    ModelFn model = [&x](const Eigen::VectorXd& p, Eigen::VectorXd& v, Eigen::MatrixXd* jac) {
        const double a = p[0], c = p[1], s = p[2], b = p[3];
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double d = x[i] - c;
            const double e = std::exp(-d * d / (2.0 * s * s));
            v[i] = a * e + b;
            if (jac) {
                (*jac)(i, 0) = e;
                (*jac)(i, 1) = a * e * d / (s * s);
                (*jac)(i, 2) = a * e * d * d / (s * s * s);
                (*jac)(i, 3) = 1.0;
            }
        }
    };

    LmResult r = lm_fit(model, y, p0);
    GaussianPeakFit out;
    out.amplitude = r.params[0];
    out.center = r.params[1];
    out.sigma = std::abs(r.params[2]);
    out.offset = r.params[3];
    out.covariance = r.covariance;
    out.std_errors = r.std_errors;
    out.residual_norm = r.residual_norm;
    out.iterations = r.iterations;
    return out;
}

DecayingSinusoidFit fit_decaying_sinusoid(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                                          double omega_guess) {
    const auto n = t.size();
    if (n != y.size())
        throw std::invalid_argument("fit_decaying_sinusoid: t/y size mismatch");
    if (n < 10)
        throw InvalidDataError("fit_decaying_sinusoid: need at least 10 points");
    if (!(omega_guess > 0.0))
        throw std::invalid_argument("fit_decaying_sinusoid: omega_guess must be positive");

    const double span = t.maxCoeff() - t.minCoeff();
    Eigen::VectorXd p0(6);
    // c0, c1, c2, tau_d, omega, phi
    p0 << y.tail(n / 8 + 1).mean(), (y.maxCoeff() - y.minCoeff()) / 2.0, 0.0, span / 2.5,
        omega_guess, 0.0;

    ModelFn model = [&t](const Eigen::VectorXd& p, Eigen::VectorXd& v, Eigen::MatrixXd* jac) {
        const double c0 = p[0], c1 = p[1], c2 = p[2], tau = p[3], om = p[4], ph = p[5];
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            const double u = t[i] / tau;
            const double env = std::exp(-u * u);
            const double arg = om * t[i] + ph;
            const double cosv = std::cos(arg);
            v[i] = c0 + env * (c2 + c1 * cosv);
            if (jac) {
                (*jac)(i, 0) = 1.0;
                (*jac)(i, 1) = env * cosv;
                (*jac)(i, 2) = env;
                (*jac)(i, 3) = env * (c2 + c1 * cosv) * 2.0 * u * u / tau;
                (*jac)(i, 4) = -env * c1 * std::sin(arg) * t[i];
                (*jac)(i, 5) = -env * c1 * std::sin(arg);
            }
        }
    };

    LmResult r = lm_fit(model, y, p0);
    DecayingSinusoidFit out;
    out.baseline = r.params[0];
    out.osc_amplitude = r.params[1];
    out.transient_offset = r.params[2];
    out.decay_time = std::abs(r.params[3]);
    out.angular_freq = std::abs(r.params[4]);
    out.phase = r.params[5];
    out.residual_norm = r.residual_norm;
    out.iterations = r.iterations;
    return out;
}

} // namespace tmsim::fit
