#pragma once

// Test-only reference implementations, deliberately independent of the
// library code paths they check.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <vector>

namespace oracles {

/// Ridge solution through the SVD: W^T = V diag(s/(s^2 + lambda)) U^T Y.
/// The library solves the normal equations with a Cholesky factorization.
inline Eigen::MatrixXd ridge_pinv(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  double lambda) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    Eigen::VectorXd filtered(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double denom = s[i] * s[i] + lambda;
        filtered[i] = denom > 0.0 ? s[i] / denom : 0.0;
    }
    const Eigen::MatrixXd wt =
        svd.matrixV() * filtered.asDiagonal() * svd.matrixU().transpose() * y;
    return wt.transpose();  // out_dim x features
}

/// Full dense eigendecomposition; the library uses an Arnoldi iteration.
inline double dense_spectral_radius(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
    double radius = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        radius = std::max(radius, std::abs(es.eigenvalues()[i]));
    return radius;
}

/// Literal Definition-1 double loop; the library filter sorts and sweeps.
inline std::vector<int> brute_force_pareto(const std::vector<std::vector<double>>& points) {
    auto dominates = [](const std::vector<double>& u, const std::vector<double>& v) {
        bool strict = false;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] > v[i]) return false;
            if (u[i] < v[i]) strict = true;
        }
        return strict;
    };
    std::vector<int> kept;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j)
            if (j != i) dominated = dominates(points[j], points[i]);
        if (!dominated) kept.push_back(static_cast<int>(i));
    }
    return kept;
}

}  // namespace oracles
