#ifndef TMSIM_QUADRATURE_HPP
#define TMSIM_QUADRATURE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace tmsim::quad {

struct GaussHermiteRule {
    Eigen::VectorXd nodes;   // roots of H_n
    Eigen::VectorXd weights; // sum w_i f(x_i) ~ integral e^{-x^2} f(x) dx
};

/// Golub-Welsch nodes and weights for physicists' Gauss-Hermite quadrature.
GaussHermiteRule gauss_hermite(int order);

/// Averages f over a normal distribution N(mu, sigma^2) with the given rule:
/// E[f] = (1/sqrt(pi)) sum w_i f(mu + sqrt(2) sigma x_i).
template <typename F>
double normal_average(const GaussHermiteRule& rule, double mu, double sigma, F&& f) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mu + std::numbers::sqrt2 * sigma * rule.nodes[i]);
    return acc / std::sqrt(std::numbers::pi);
}

} // namespace tmsim::quad

#endif
