#include "qf/simplex.hpp"

#include <vector>

#include "qf/errors.hpp"

namespace qf::lp {
namespace {

constexpr double kEps = 1e-9;

}  // namespace

FeasibilityResult solve_feasibility(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());

    // Equality form with one slack per row; rows with negative rhs are
    // negated (sign[i]) and receive an artificial variable.
    std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
    std::vector<int> artificial_of(static_cast<std::size_t>(m), -1);
    int art_count = 0;
    for (int i = 0; i < m; ++i)
        if (b(i) < 0.0) {
            sign[static_cast<std::size_t>(i)] = -1.0;
            artificial_of[static_cast<std::size_t>(i)] = art_count++;
        }

    const int cols = n + m + art_count;  // x, slacks, artificials
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m + 1, cols + 1);
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double s = sign[static_cast<std::size_t>(i)];
        T.block(i, 0, 1, n) = s * A.row(i);
        T(i, n + i) = s;  // slack
        T(i, cols) = s * b(i);
        const int a = artificial_of[static_cast<std::size_t>(i)];
        if (a >= 0) {
            T(i, n + m + a) = 1.0;
            basis[static_cast<std::size_t>(i)] = n + m + a;
            T.row(m) -= T.row(i);  // price out the artificial basis column
        } else {
            basis[static_cast<std::size_t>(i)] = n + i;
        }
    }
    for (int a = 0; a < art_count; ++a) T(m, n + m + a) += 1.0;

    FeasibilityResult result;
    while (true) {
        int entering = -1;
        for (int j = 0; j < cols; ++j)
            if (T(m, j) < -kEps) {
                entering = j;  // Bland: smallest index
                break;
            }
        if (entering < 0) break;
        int leaving = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m; ++i) {
            if (T(i, entering) <= kEps) continue;
            const double ratio = T(i, cols) / T(i, entering);
            if (leaving < 0 || ratio < best_ratio - kEps ||
                (ratio < best_ratio + kEps &&
                 basis[static_cast<std::size_t>(i)] <
                     basis[static_cast<std::size_t>(leaving)]))
            {
                leaving = i;
                best_ratio = ratio;
            }
        }
        if (leaving < 0)
            throw NumericalFailure("phase-I objective unbounded below");
        T.row(leaving) /= T(leaving, entering);
        for (int i = 0; i <= m; ++i) {
            if (i == leaving) continue;
            const double f = T(i, entering);
            if (f != 0.0) T.row(i) -= f * T.row(leaving);
        }
        basis[static_cast<std::size_t>(leaving)] = entering;
        ++result.iterations;
    }

    result.objective = -T(m, cols);
    if (result.objective <= 1e-7) {
        result.feasible = true;
        result.x = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < m; ++i)
            if (basis[static_cast<std::size_t>(i)] < n)
                result.x(basis[static_cast<std::size_t>(i)]) = T(i, cols);
    } else {
        // Farkas vector from the reduced costs on the slack columns (see
        // certificate_residual for the exact conditions it satisfies)
        result.y = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < m; ++i) result.y(i) = std::max(T(m, n + i), 0.0);
    }
    return result;
}

double primal_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& x) {
    double worst = 0.0;
    const Eigen::VectorXd slack = A * x - b;
    for (int i = 0; i < slack.size(); ++i) worst = std::max(worst, slack(i));
    for (int j = 0; j < x.size(); ++j) worst = std::max(worst, -x(j));
    return worst;
}

double certificate_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& y) {
    double worst = y.dot(b);
    for (int i = 0; i < y.size(); ++i) worst = std::max(worst, -y(i));
    const Eigen::VectorXd yA = A.transpose() * y;
    for (int j = 0; j < yA.size(); ++j) worst = std::max(worst, -yA(j));
    return worst;
}

}  // namespace qf::lp
