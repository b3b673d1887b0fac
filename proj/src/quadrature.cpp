#include "tmsim/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tmsim::quad {

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1)
        throw std::invalid_argument("gauss_hermite: order must be >= 1");
    // Jacobi matrix of the (physicists') Hermite recurrence has off-diagonal
    // sqrt(k/2); eigenvalues are the nodes, squared first eigenvector
    // components scaled by sqrt(pi) the weights.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = std::sqrt(k / 2.0);
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermiteRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(order);
    const double spi = std::sqrt(std::numbers::pi);
    for (int k = 0; k < order; ++k) {
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = spi * v0 * v0;
    }
    return rule;
}

} // namespace tmsim::quad
