#include "tmsim/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace tmsim::gauss {

namespace {

constexpr double k_two_pi = 2.0 * std::numbers::pi;

void check_mode(const GaussianState& state, int mode, const char* who) {
    if (mode < 0 || mode >= state.mode_count())
        throw std::invalid_argument(std::string(who) + ": mode index out of range");
}

} // namespace

SqueezeParams::SqueezeParams(double r, double theta) : r(r), theta(theta) {
    if (!(r >= 0.0))
        throw std::invalid_argument("SqueezeParams: r must be nonnegative");
    this->theta = std::fmod(theta, k_two_pi);
    if (this->theta < 0.0) this->theta += k_two_pi;
}

OscillatorConfig::OscillatorConfig(double mass, double omega, double omega_prime)
    : mass(mass), omega(omega), omega_prime(omega_prime) {
    if (!(mass > 0.0)) throw std::invalid_argument("OscillatorConfig: mass must be positive");
    if (!(omega > 0.0)) throw std::invalid_argument("OscillatorConfig: omega must be positive");
    if (!(omega_prime > 0.0))
        throw std::invalid_argument("OscillatorConfig: omega_prime must be positive");
}

double OscillatorConfig::dx0() const { return std::sqrt(k_hbar / (2.0 * mass * omega)); }
double OscillatorConfig::dp0() const { return std::sqrt(k_hbar * mass * omega / 2.0); }
double OscillatorConfig::dv0() const { return dp0() / mass; }

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto n = mean_.size();
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("GaussianState: mean length must be a positive multiple of 2");
    if (cov_.rows() != n || cov_.cols() != n)
        throw std::invalid_argument("GaussianState: covariance dimension mismatch");
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("GaussianState: covariance not symmetric");
    cov_ = 0.5 * (cov_ + cov_.transpose().eval());
    Eigen::LLT<Eigen::MatrixXd> llt(cov_);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("GaussianState: covariance not positive-definite");
}

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov, unchecked_t)
    : mean_(std::move(mean)), cov_(std::move(cov)) {}

GaussianState GaussianState::vacuum(int n_modes) {
    if (n_modes < 1)
        throw std::invalid_argument("vacuum: n_modes must be >= 1");
    return thermal(n_modes, 0.0);
}

GaussianState GaussianState::thermal(int n_modes, double nbar) {
    if (n_modes < 1)
        throw std::invalid_argument("thermal: n_modes must be >= 1");
    if (!(nbar >= 0.0))
        throw std::invalid_argument("thermal: nbar must be nonnegative");
    const int n = 2 * n_modes;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd cov = ((2.0 * nbar + 1.0) / 4.0) * Eigen::MatrixXd::Identity(n, n);
    return GaussianState(std::move(mean), std::move(cov), unchecked_t{});
}

double GaussianState::variance(int quad_index) const {
    if (quad_index < 0 || quad_index >= mean_.size())
        throw std::invalid_argument("variance: quadrature index out of range");
    return cov_(quad_index, quad_index);
}

GaussianState apply_symplectic(const GaussianState& state, const Eigen::MatrixXd& s) {
    const auto n = state.mean().size();
    if (s.rows() != n || s.cols() != n)
        throw std::invalid_argument("apply_symplectic: matrix dimension mismatch");
    Eigen::VectorXd mean = s * state.mean();
    Eigen::MatrixXd cov = s * state.cov() * s.transpose();
    cov = 0.5 * (cov + cov.transpose().eval());
    return GaussianState(std::move(mean), std::move(cov), GaussianState::unchecked_t{});
}

namespace detail {

Eigen::Matrix2d squeeze_matrix(const SqueezeParams& params) {
    const double ch = std::cosh(params.r);
    const double sh = std::sinh(params.r);
    const double c2 = std::cos(2.0 * params.theta);
    const double s2 = std::sin(2.0 * params.theta);
    Eigen::Matrix2d m;
    m << ch - sh * c2, -sh * s2,
         -sh * s2, ch + sh * c2;
    return m;
}

Eigen::Matrix2d rotation_matrix(double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    Eigen::Matrix2d m;
    m << c, s,
         -s, c;
    return m;
}

GaussianState mode_mixer(const GaussianState& state, int mode_a, int mode_b, double alpha) {
    check_mode(state, mode_a, "mode_mixer");
    check_mode(state, mode_b, "mode_mixer");
    if (mode_a == mode_b)
        throw std::invalid_argument("mode_mixer: modes must be distinct");
    const auto n = state.mean().size();
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    Eigen::MatrixXd full = Eigen::MatrixXd::Identity(n, n);
    const int a = 2 * mode_a, b = 2 * mode_b;
    for (int q = 0; q < 2; ++q) {
        full(a + q, a + q) = c;
        full(a + q, b + q) = s;
        full(b + q, a + q) = -s;
        full(b + q, b + q) = c;
    }
    return apply_symplectic(state, full);
}

} // namespace detail

namespace {

GaussianState apply_single_mode(const GaussianState& state, int mode, const Eigen::Matrix2d& m) {
    const auto n = state.mean().size();
    Eigen::MatrixXd full = Eigen::MatrixXd::Identity(n, n);
    full.block<2, 2>(2 * mode, 2 * mode) = m;
    return apply_symplectic(state, full);
}

} // namespace

GaussianState apply_squeeze(const GaussianState& state, int mode, const SqueezeParams& params) {
    check_mode(state, mode, "apply_squeeze");
    return apply_single_mode(state, mode, detail::squeeze_matrix(params));
}

GaussianState apply_rotation(const GaussianState& state, int mode, double phi) {
    check_mode(state, mode, "apply_rotation");
    return apply_single_mode(state, mode, detail::rotation_matrix(phi));
}

GaussianState apply_beam_splitter_50_50(const GaussianState& state, int mode_a, int mode_b) {
    return detail::mode_mixer(state, mode_a, mode_b, std::numbers::pi / 4.0);
}

std::vector<double> symplectic_eigenvalues(const GaussianState& state) {
    const auto n = state.mean().size();
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < n / 2; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    Eigen::MatrixXd prod = omega * state.cov();
    Eigen::EigenSolver<Eigen::MatrixXd> es(prod, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double im = es.eigenvalues()[i].imag();
        if (im > 0.0) out.push_back(im);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double momentum_uncertainty_eq2(double r, double theta_x, double theta_y) {
    if (!(r >= 0.0))
        throw std::invalid_argument("momentum_uncertainty_eq2: r must be nonnegative");
    const double v = std::cosh(2.0 * r) +
                     std::sinh(2.0 * r) * std::cos(theta_x + theta_y) * std::cos(theta_x - theta_y);
    return std::sqrt(v) / 2.0;
}

double single_mode_width_vs_time(double r, double omega, double t) {
    if (!(r >= 0.0))
        throw std::invalid_argument("single_mode_width_vs_time: r must be nonnegative");
    if (!(t >= 0.0))
        throw std::invalid_argument("single_mode_width_vs_time: t must be nonnegative");
    const double v = std::cosh(2.0 * r) + std::sinh(2.0 * r) * std::cos(2.0 * omega * t);
    return std::sqrt(v) / 2.0;
}

SumDiffUncertainty eq3_uncertainties(double r, double theta_x) {
    if (!(r >= 0.0))
        throw std::invalid_argument("eq3_uncertainties: r must be nonnegative");
    const double em = std::exp(-2.0 * r);
    const double ep = std::exp(2.0 * r);
    const double s2 = std::sin(theta_x) * std::sin(theta_x);
    const double c2 = std::cos(theta_x) * std::cos(theta_x);
    const double root2 = std::numbers::sqrt2;
    return {root2 * std::sqrt(em * s2 + ep * c2) / 2.0,
            root2 * std::sqrt(em * c2 + ep * s2) / 2.0};
}

namespace {

// Variances of (xbar_a - xbar_b) and (pbar_a + pbar_b), the commuting pair
// probed in the experiment.
std::pair<double, double> epr_pair_variances(const GaussianState& state, int a, int b) {
    check_mode(state, a, "epr pair");
    check_mode(state, b, "epr pair");
    if (a == b)
        throw std::invalid_argument("epr pair: modes must be distinct");
    const auto& c = state.cov();
    const int xa = 2 * a, pa = 2 * a + 1, xb = 2 * b, pb = 2 * b + 1;
    const double vx = c(xa, xa) + c(xb, xb) - 2.0 * c(xa, xb);
    const double vp = c(pa, pa) + c(pb, pb) + 2.0 * c(pa, pb);
    return {vx, vp};
}

} // namespace

double duan_simon_value(const GaussianState& state, int mode_a, int mode_b) {
    auto [vx, vp] = epr_pair_variances(state, mode_a, mode_b);
    return vx + vp;
}

double epr_product(const GaussianState& state, int mode_a, int mode_b) {
    auto [vx, vp] = epr_pair_variances(state, mode_a, mode_b);
    return std::sqrt(vx) * std::sqrt(vp);
}

double epr_product_surrogate(double r) {
    const double diff = eq3_uncertainties(r, std::numbers::pi / 2.0).diff;
    const double sum = eq3_uncertainties(r, 0.0).sum;
    return diff * sum;
}

namespace {

void check_conditioning(const Eigen::MatrixXd& cov, const char* who) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw DegeneracyError(std::string(who) + ": covariance numerically degenerate");
}

} // namespace

double wigner_value(const GaussianState& state, const Eigen::VectorXd& point) {
    const auto n = state.mean().size();
    if (point.size() != n)
        throw std::invalid_argument("wigner_value: point length must be 2N");
    check_conditioning(state.cov(), "wigner_value");
    Eigen::LLT<Eigen::MatrixXd> llt(state.cov());
    const Eigen::VectorXd d = point - state.mean();
    const double q = d.dot(llt.solve(d));
    double sqrt_det = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) sqrt_det *= llt.matrixL()(i, i);
    const double norm = std::pow(k_two_pi, n / 2.0) * sqrt_det;
    return std::exp(-0.5 * q) / norm;
}

WignerGrid wigner_projection(const GaussianState& state, int axis_a, int axis_b,
                             const GridSpec& grid) {
    const auto n = state.mean().size();
    if (axis_a < 0 || axis_a >= n || axis_b < 0 || axis_b >= n)
        throw std::invalid_argument("wigner_projection: quadrature index out of range");
    if (axis_a == axis_b)
        throw std::invalid_argument("wigner_projection: axes must be distinct");
    if (grid.na < 2 || grid.nb < 2)
        throw std::invalid_argument("wigner_projection: grid must have at least 2 points per axis");

    // The marginal over two quadratures of a Gaussian is the Gaussian with the
    // corresponding 2x2 covariance sub-block.
    Eigen::Matrix2d sub;
    sub << state.cov()(axis_a, axis_a), state.cov()(axis_a, axis_b),
           state.cov()(axis_b, axis_a), state.cov()(axis_b, axis_b);
    check_conditioning(sub, "wigner_projection");
    const Eigen::Vector2d mu(state.mean()(axis_a), state.mean()(axis_b));
    const double det = sub.determinant();
    const Eigen::Matrix2d inv = sub.inverse();
    const double norm = k_two_pi * std::sqrt(det);

    WignerGrid out;
    out.axis_a = axis_a;
    out.axis_b = axis_b;
    out.spec = grid;
    out.a_coords = Eigen::VectorXd::LinSpaced(grid.na, grid.a_min, grid.a_max);
    out.b_coords = Eigen::VectorXd::LinSpaced(grid.nb, grid.b_min, grid.b_max);
    out.values.resize(grid.na, grid.nb);
    for (int i = 0; i < grid.na; ++i) {
        for (int j = 0; j < grid.nb; ++j) {
            const Eigen::Vector2d d(out.a_coords[i] - mu[0], out.b_coords[j] - mu[1]);
            out.values(i, j) = std::exp(-0.5 * d.dot(inv * d)) / norm;
        }
    }
    return out;
}

} // namespace tmsim::gauss
