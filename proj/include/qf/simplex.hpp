#pragma once

// Dense phase-I simplex for feasibility of A x <= b, x >= 0, with Bland's
// rule (no cycling) and a Farkas certificate on infeasibility:
// y >= 0, y^T A >= 0 componentwise, y^T b < 0.

#include <Eigen/Dense>

namespace qf::lp {

struct FeasibilityResult {
    bool feasible = false;
    Eigen::VectorXd x;  // a feasible point, when feasible
    Eigen::VectorXd y;  // Farkas certificate, when infeasible
    double objective = 0.0;  // phase-I optimum (sum of artificials)
    int iterations = 0;
};

FeasibilityResult solve_feasibility(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Residual checks used to re-verify results independently of the solver.
double primal_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& x);
/// max(-min_i y_i, -min_j (y^T A)_j, y^T b): negative means a valid
/// strict certificate.
double certificate_residual(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& y);

}  // namespace qf::lp
