#include "tmsim/fock.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace tmsim::fock {

namespace {

// ln k! for k = 0..cap, filled on first use.
const double* log_factorials(int cap = 4096) {
    static std::vector<double> table = [cap] {
        std::vector<double> t(cap + 1, 0.0);
        for (int k = 2; k <= cap; ++k) t[k] = t[k - 1] + std::log(static_cast<double>(k));
        return t;
    }();
    return table.data();
}

// ln C(n, k); the caller guarantees 0 <= k <= n.
double log_binomial(int n, int k) {
    const double* lf = log_factorials();
    return lf[n] - lf[k] - lf[n - k];
}

// ln sqrt(C(n1,k1) C(n2,k2) C(n3,k3) C(n4,k4)), with an exact product fast
// path for small indices (four binomials with n <= 28 stay below 2^53).
double log_binomial_product_sqrt(int n1, int k1, int n2, int k2, int n3, int k3, int n4, int k4) {
    if (n1 < 28 && n2 < 28 && n3 < 28 && n4 < 28) {
        auto binom = [](int n, int k) {
            double b = 1.0;
            k = std::min(k, n - k);
            for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
            return b;
        };
        return 0.5 * std::log(binom(n1, k1) * binom(n2, k2) * binom(n3, k3) * binom(n4, k4));
    }
    return 0.5 * (log_binomial(n1, k1) + log_binomial(n2, k2) + log_binomial(n3, k3) +
                  log_binomial(n4, k4));
}

void check_nonneg_indices(int n_x, int n_y, int l_x, int l_y) {
    if (n_x < 0 || n_y < 0 || l_x < 0 || l_y < 0)
        throw std::invalid_argument("s2_matrix_element_sq: indices must be nonnegative");
}

} // namespace

Eigen::VectorXd FockDistribution::marginal(int axis) const {
    if (axis == 0) return probs.rowwise().sum();
    if (axis == 1) return probs.colwise().sum().transpose();
    throw std::invalid_argument("FockDistribution::marginal: axis must be 0 or 1");
}

FockDistribution FockDistribution::from_product(const Eigen::VectorXd& px,
                                                const Eigen::VectorXd& py) {
    if (px.size() != py.size())
        throw std::invalid_argument("FockDistribution::from_product: size mismatch");
    FockDistribution d;
    d.probs = px * py.transpose();
    d.truncation_mass = 1.0 - d.probs.sum();
    return d;
}

TwoModeSqueezeOp::TwoModeSqueezeOp(double r, double theta0, int l_max)
    : r(r), theta0(theta0), l_max(l_max) {
    if (!(r >= 0.0)) throw std::invalid_argument("TwoModeSqueezeOp: r must be nonnegative");
    if (l_max < 0) throw std::invalid_argument("TwoModeSqueezeOp: l_max must be nonnegative");
}

FockDistribution tmsv_probabilities(double r, int n_max) {
    if (!(r >= 0.0)) throw std::invalid_argument("tmsv_probabilities: r must be nonnegative");
    if (n_max < 0) throw std::invalid_argument("tmsv_probabilities: n_max must be nonnegative");
    FockDistribution d;
    d.probs = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    const double t2 = std::tanh(r) * std::tanh(r);
    const double sech2 = 1.0 / (std::cosh(r) * std::cosh(r));
    double p = sech2;
    for (int n = 0; n <= n_max; ++n) {
        d.probs(n, n) = p;
        p *= t2;
    }
    d.truncation_mass = std::pow(t2, n_max + 1);
    return d;
}

FockMarginal smsv_probabilities(double r, int n_max) {
    if (!(r >= 0.0)) throw std::invalid_argument("smsv_probabilities: r must be nonnegative");
    if (n_max < 0) throw std::invalid_argument("smsv_probabilities: n_max must be nonnegative");
    FockMarginal m;
    m.probs = Eigen::VectorXd::Zero(n_max + 1);
    // P(2m) = (2m)!/(2^m m!)^2 tanh^{2m} r / cosh r, built by the ratio
    // P(2m)/P(2m-2) = tanh^2 r (2m-1)/(2m).
    const double t2 = std::tanh(r) * std::tanh(r);
    double p = 1.0 / std::cosh(r);
    for (int mm = 0; 2 * mm <= n_max; ++mm) {
        m.probs(2 * mm) = p;
        p *= t2 * (2.0 * mm + 1.0) / (2.0 * mm + 2.0);
    }
    m.truncation_mass = 1.0 - m.probs.sum();
    return m;
}

double s2_matrix_element_sq(int n_x, int n_y, int l_x, int l_y, double r) {
    check_nonneg_indices(n_x, n_y, l_x, l_y);
    if (!(r >= 0.0)) throw std::invalid_argument("s2_matrix_element_sq: r must be nonnegative");
    const int d = l_x - n_x;
    if (l_y - n_y != d) return 0.0;
    if (r == 0.0) return d == 0 ? 1.0 : 0.0;

    const double log_sh2 = 2.0 * std::log(std::sinh(r));
    const double log_pref =
        2.0 * d * std::log(std::tanh(r)) - 2.0 * (n_x + n_y + 1) * std::log(std::cosh(r));

    // Alternating sum evaluated with its largest term factored out, so the
    // final exp is taken on the (bounded) total only and large negative d
    // cannot overflow the prefactor.
    const int g_lo = std::max(0, -d);
    const int g_hi = std::min(n_x, n_y);
    double log_max = -std::numeric_limits<double>::infinity();
    for (int g = g_lo; g <= g_hi; ++g) {
        const double lt = g * log_sh2 +
                          log_binomial_product_sqrt(n_x, g, n_y, g, l_x, d + g, l_y, d + g);
        log_max = std::max(log_max, lt);
    }
    if (!std::isfinite(log_max)) return 0.0;
    long double acc = 0.0L;
    for (int g = g_lo; g <= g_hi; ++g) {
        const double lt = g * log_sh2 +
                          log_binomial_product_sqrt(n_x, g, n_y, g, l_x, d + g, l_y, d + g);
        const long double term = std::exp(static_cast<long double>(lt - log_max));
        acc += (g % 2 == 0) ? term : -term;
    }
    if (acc == 0.0L) return 0.0;
    const double log_total =
        log_pref + 2.0 * (log_max + static_cast<double>(std::log(std::abs(acc))));
    return std::exp(log_total);
}

Eigen::MatrixXd s2_oracle(double r, int dim) {
    if (!(r >= 0.0)) throw std::invalid_argument("s2_oracle: r must be nonnegative");
    if (dim < 1) throw std::invalid_argument("s2_oracle: dim must be >= 1");
    if (dim > 40)
        throw ResourceLimitError("s2_oracle: dim > 40 per mode exceeds dense feasibility");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXd axy = Eigen::kroneckerProduct(a, a).eval();
    Eigen::MatrixXd gen = r * (axy - axy.transpose());
    return gen.exp();
}

Eigen::MatrixXd s2_oracle_sector(double r, int q, int n_rungs) {
    if (!(r >= 0.0)) throw std::invalid_argument("s2_oracle_sector: r must be nonnegative");
    if (q < 0) throw std::invalid_argument("s2_oracle_sector: q must be nonnegative");
    if (n_rungs < 0) throw std::invalid_argument("s2_oracle_sector: n_rungs must be nonnegative");
    const int n = n_rungs + 1;
    // Generator restricted to the sector spanned by |m, m+q> is real
    // skew-symmetric tridiagonal; with D = diag(i^m) it equals D (-i T) D^{-1}
    // for the symmetric tridiagonal T with entries sqrt(m (m+q)). Hence
    // |exp(r gen)|^2 = |U exp(-i r lambda) U^T|^2 elementwise.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int m = 1; m < n; ++m) {
        const double c = std::sqrt(static_cast<double>(m) * (m + q));
        t(m - 1, m) = c;
        t(m, m - 1) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXd& u = es.eigenvectors();
    Eigen::MatrixXd out(n, n);
    std::vector<std::complex<double>> phase(n);
    for (int k = 0; k < n; ++k) phase[k] = std::exp(std::complex<double>(0.0, -r * lam[k]));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            std::complex<double> amp(0.0, 0.0);
            for (int k = 0; k < n; ++k) amp += u(i, k) * u(j, k) * phase[k];
            out(i, j) = std::norm(amp);
            out(j, i) = out(i, j);
        }
    }
    return out;
}

FockDistribution thermal_weighted_distribution(const TwoModeSqueezeOp& op, double nbar0,
                                               int n_max) {
    if (!(nbar0 >= 0.0))
        throw std::invalid_argument("thermal_weighted_distribution: nbar0 must be nonnegative");
    if (n_max < 0)
        throw std::invalid_argument("thermal_weighted_distribution: n_max must be nonnegative");
    if (nbar0 == 0.0) return tmsv_probabilities(op.r, n_max);

    FockDistribution d;
    d.probs = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    const double w0 = 1.0 / ((1.0 + nbar0) * (1.0 + nbar0));
    const double wq = nbar0 / (1.0 + nbar0);
    for (int nx = 0; nx <= n_max; ++nx) {
        for (int ny = 0; ny <= n_max; ++ny) {
            // Only initial occupations with l_y - n_y = l_x - n_x contribute.
            double acc = 0.0;
            for (int lx = 0; lx <= op.l_max; ++lx) {
                const int ly = lx - nx + ny;
                if (ly < 0 || lx + ly > op.l_max) continue;
                acc += w0 * std::pow(wq, lx + ly) * s2_matrix_element_sq(nx, ny, lx, ly, op.r);
            }
            d.probs(nx, ny) = acc;
        }
    }
    d.truncation_mass = 1.0 - d.probs.sum();
    // Boltzmann mass of the neglected initial occupations l_x + l_y > l_max:
    // tail of the total-occupation distribution P(L) = (L+1) w0 wq^L.
    double tail = 0.0;
    const int L = op.l_max;
    tail = std::pow(wq, L + 1) * ((L + 2) - (L + 1) * wq); // closed-form remainder / w0^{-1}
    d.truncation_warning = tail > 1e-9;
    return d;
}

PhononStats phonon_stats(const Eigen::VectorXd& marginal) {
    double m1 = 0.0, m2 = 0.0;
    for (Eigen::Index n = 0; n < marginal.size(); ++n) {
        m1 += static_cast<double>(n) * marginal[n];
        m2 += static_cast<double>(n) * static_cast<double>(n) * marginal[n];
    }
    return {m1, m2 - m1 * m1};
}

PhononStats phonon_stats(const FockDistribution& dist, Axis axis, double gate) {
    if (dist.truncation_mass > gate)
        throw std::invalid_argument("phonon_stats: truncation mass exceeds gate");
    return phonon_stats(dist.marginal(axis == Axis::X ? 0 : 1));
}

Eigen::VectorXd phonon_distribution_from_cov(double v1, double v2, int n_max) {
    if (!(v1 > 0.0) || !(v2 > 0.0))
        throw std::invalid_argument("phonon_distribution_from_cov: variances must be positive");
    if (n_max < 0)
        throw std::invalid_argument("phonon_distribution_from_cov: n_max must be nonnegative");
    const double a1 = 4.0 * v1 + 1.0, b1 = (4.0 * v1 - 1.0) / a1;
    const double a2 = 4.0 * v2 + 1.0, b2 = (4.0 * v2 - 1.0) / a2;
    // c_k(b) = C(2k, k) (b/4)^k via c_k = c_{k-1} b (2k-1)/(2k).
    Eigen::VectorXd c1(n_max + 1), c2(n_max + 1);
    c1[0] = c2[0] = 1.0;
    for (int k = 1; k <= n_max; ++k) {
        c1[k] = c1[k - 1] * b1 * (2.0 * k - 1.0) / (2.0 * k);
        c2[k] = c2[k - 1] * b2 * (2.0 * k - 1.0) / (2.0 * k);
    }
    const double norm = 2.0 / std::sqrt(a1 * a2);
    Eigen::VectorXd p(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) acc += c1[k] * c2[n - k];
        p[n] = norm * acc;
    }
    return p;
}

Eigen::VectorXd phonon_distribution_from_cov(const Eigen::Matrix2d& cov, int n_max) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov, Eigen::EigenvaluesOnly);
    return phonon_distribution_from_cov(es.eigenvalues()[0], es.eigenvalues()[1], n_max);
}

void write_csv(const FockDistribution& dist, std::ostream& os) {
    const int n = dist.n_max();
    os << "nx\\ny";
    for (int ny = 0; ny <= n; ++ny) os << "," << ny;
    os << "\n";
    char buf[32];
    for (int nx = 0; nx <= n; ++nx) {
        os << nx;
        for (int ny = 0; ny <= n; ++ny) {
            std::snprintf(buf, sizeof(buf), "%.17g", dist.probs(nx, ny));
            os << "," << buf;
        }
        os << "\n";
    }
}

} // namespace tmsim::fock
