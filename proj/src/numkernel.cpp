#include "qf/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qf::num {

std::vector<Cluster> cluster_values(std::span<const double> values, double tol_abs,
                                    double tol_rel) {
    std::vector<Cluster> clusters;
    if (values.empty()) return clusters;

    double max_abs = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericalFailure("cluster_values: non-finite input");
        max_abs = std::max(max_abs, std::abs(v));
    }
    const double gap = tol_abs + tol_rel * max_abs;

    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[static_cast<std::size_t>(a)] <
                                         values[static_cast<std::size_t>(b)]; });

    Cluster current;
    double prev = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const int idx = order[k];
        const double v = values[static_cast<std::size_t>(idx)];
        if (!current.members.empty() && v - prev > gap) {
            clusters.push_back(std::move(current));
            current = Cluster{};
        }
        current.members.push_back(idx);
        prev = v;
    }
    clusters.push_back(std::move(current));

    for (auto& c : clusters) {
        double sum = 0.0;
        for (int i : c.members) sum += values[static_cast<std::size_t>(i)];
        c.representative = sum / static_cast<double>(c.members.size());
    }
    return clusters;
}

int EigenSystem::index_of(double value, double tol) const {
    int best = -1;
    double best_gap = tol;
    for (int i = 0; i < size(); ++i) {
        const double gap = std::abs(eigenvalues[static_cast<std::size_t>(i)] - value);
        if (gap <= best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    if (best < 0) {
        std::ostringstream os;
        os << "value " << value << " is not in the spectrum";
        throw UnknownObservable(os.str());
    }
    return best;
}

Matrix EigenSystem::apply(const std::function<double(double)>& f) const {
    Matrix out = Matrix::Zero(dimension(), dimension());
    for (int i = 0; i < size(); ++i)
        out += f(eigenvalues[static_cast<std::size_t>(i)]) *
               projectors[static_cast<std::size_t>(i)];
    return out;
}

Matrix EigenSystem::reconstruct() const {
    return apply([](double a) { return a; });
}

double hermiticity_residual(const Matrix& m) {
    return (m - m.adjoint()).norm() / (1.0 + m.norm());
}

bool is_hermitian(const Matrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_residual(m) <= tol;
}

EigenSystem hermitian_eigendecompose(const Matrix& m, double tol, double cluster_tol_abs,
                                     double cluster_tol_rel) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eigendecompose: matrix not square");
    if (!is_hermitian(m, tol)) throw NotHermitian("eigendecompose: matrix not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("eigendecompose: iteration did not converge");

    const Eigen::VectorXd raw = solver.eigenvalues();
    const Matrix vecs = solver.eigenvectors();

    std::vector<double> raw_vals(raw.data(), raw.data() + raw.size());
    const auto clusters = cluster_values(raw_vals, cluster_tol_abs, cluster_tol_rel);

    EigenSystem sys;
    const int n = static_cast<int>(m.rows());
    for (const auto& c : clusters) {
        Matrix proj = Matrix::Zero(n, n);
        for (int idx : c.members) {
            const CVector v = vecs.col(idx);
            proj += v * v.adjoint();
        }
        proj = (proj + proj.adjoint()) / 2.0;  // restore Hermiticity
        sys.eigenvalues.push_back(c.representative);
        sys.projectors.push_back(std::move(proj));
        sys.multiplicities.push_back(static_cast<int>(c.members.size()));
    }
    return sys;
}

}  // namespace qf::num
