#pragma once

// Complex-Hermitian eigen-machinery with explicit degenerate-eigenvalue
// clustering. Everything downstream (observables, updates, spectral
// calculus, embeddings) depends on the tolerances fixed here.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qf/errors.hpp"

namespace qf::num {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kClusterTolAbs = 1e-10;
inline constexpr double kClusterTolRel = 1e-8;
inline constexpr double kHermitianTol = 1e-10;

/// One cluster of near-coincident values: representative (mean of members)
/// plus the indices of the clustered inputs.
struct Cluster {
    double representative = 0.0;
    std::vector<int> members;
};

/// Chain clustering: two values share a cluster iff they are connected by a
/// chain of gaps <= tol_abs + tol_rel * max|value|. Representatives are
/// strictly increasing and every input index appears in exactly one cluster.
std::vector<Cluster> cluster_values(std::span<const double> values,
                                    double tol_abs = kClusterTolAbs,
                                    double tol_rel = kClusterTolRel);

/// Clustered spectrum of a Hermitian matrix: distinct eigenvalues sorted
/// ascending, one spectral projector per cluster, multiplicities from the
/// projector traces.
struct EigenSystem {
    std::vector<double> eigenvalues;
    std::vector<Matrix> projectors;
    std::vector<int> multiplicities;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    int dimension() const {
        return projectors.empty() ? 0 : static_cast<int>(projectors.front().rows());
    }
    /// Index of the cluster whose representative is closest to `value`;
    /// throws UnknownObservable if nothing lies within `tol`.
    int index_of(double value, double tol = 1e-7) const;
    const Matrix& projector_of(double value, double tol = 1e-7) const {
        return projectors[static_cast<std::size_t>(index_of(value, tol))];
    }
    /// Sum of f(alpha) * E_alpha over the clustered spectrum.
    Matrix apply(const std::function<double(double)>& f) const;
    /// Sum of alpha * E_alpha (reconstruction of the original matrix).
    Matrix reconstruct() const;
};

bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

/// Frobenius norm of M - M^dagger relative to 1 + ||M||_F.
double hermiticity_residual(const Matrix& m);

/// Eigendecomposition with degeneracy clustering. Projectors are sums of
/// rank-1 eigenvector outer products within each cluster, symmetrized to
/// restore Hermiticity lost to round-off.
EigenSystem hermitian_eigendecompose(const Matrix& m, double tol = kHermitianTol,
                                     double cluster_tol_abs = kClusterTolAbs,
                                     double cluster_tol_rel = kClusterTolRel);

}  // namespace qf::num
