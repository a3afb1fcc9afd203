#pragma once

// Desk-scale convex quadratic programs: minimize 0.5 x'Qx + c'x subject to
// optional per-coordinate box bounds and halfspaces a.x <= b. Dimension is
// capped at 64; Q must be symmetric and (for admissible phenomena) positive
// semidefinite up to a small eigenvalue floor.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "reasonlab/errors.hpp"

namespace reasonlab::opt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Halfspace {
    VectorXd normal; // a
    double offset;   // b, meaning a.x <= b
};

struct Box {
    VectorXd lo;
    VectorXd hi;
};

struct QpProblem {
    MatrixXd Q;
    VectorXd c;
    std::optional<Box> box;
    std::vector<Halfspace> halfspaces;

    int dim() const { return static_cast<int>(c.size()); }

    void validate() const {
        const int n = dim();
        if (n < 1 || n > 64) throw ConfigError("problem dimension must be in [1, 64]");
        if (Q.rows() != n || Q.cols() != n)
            throw DimensionMismatch("Q must be n x n");
        if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw ConfigError("Q must be symmetric to 1e-12");
        if (box) {
            if (box->lo.size() != n || box->hi.size() != n)
                throw DimensionMismatch("box bounds must have n entries");
            for (int j = 0; j < n; ++j)
                if (box->lo[j] > box->hi[j])
                    throw ConfigError("box bound lo > hi at coordinate " +
                                      std::to_string(j));
        }
        for (const auto& h : halfspaces) {
            if (h.normal.size() != n)
                throw DimensionMismatch("halfspace normal must have n entries");
            if (h.normal.norm() == 0.0)
                throw ConfigError("halfspace normal must be nonzero");
        }
    }

    double min_eigenvalue() const {
        return Eigen::SelfAdjointEigenSolver<MatrixXd>(Q).eigenvalues().minCoeff();
    }

    double max_eigenvalue() const {
        return Eigen::SelfAdjointEigenSolver<MatrixXd>(Q).eigenvalues().maxCoeff();
    }

    bool same_geometry(const QpProblem& other, double tol = 1e-12) const {
        if (dim() != other.dim()) return false;
        if ((Q - other.Q).cwiseAbs().maxCoeff() > tol) return false;
        if (box.has_value() != other.box.has_value()) return false;
        if (box) {
            for (int j = 0; j < dim(); ++j) {
                // Infinite bounds compare by identity, not difference.
                if (box->lo[j] != other.box->lo[j] && std::abs(box->lo[j] - other.box->lo[j]) > tol)
                    return false;
                if (box->hi[j] != other.box->hi[j] && std::abs(box->hi[j] - other.box->hi[j]) > tol)
                    return false;
            }
        }
        if (halfspaces.size() != other.halfspaces.size()) return false;
        for (std::size_t i = 0; i < halfspaces.size(); ++i) {
            if ((halfspaces[i].normal - other.halfspaces[i].normal).cwiseAbs().maxCoeff() > tol)
                return false;
            if (std::abs(halfspaces[i].offset - other.halfspaces[i].offset) > tol)
                return false;
        }
        return true;
    }
};

inline double qp_objective(const QpProblem& problem, const VectorXd& x) {
    return 0.5 * x.dot(problem.Q * x) + problem.c.dot(x);
}

struct QpSolution {
    VectorXd x;
    VectorXd halfspace_multipliers; // one per halfspace, >= 0
    VectorXd box_lo_multipliers;    // one per coordinate, >= 0
    VectorXd box_hi_multipliers;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // objective after each outer iteration
};

struct KktResidual {
    double stationarity = 0.0;  // inf-norm of the stationarity equation
    double primal_infeas = 0.0; // worst constraint violation
    double comp_slack = 0.0;    // worst |multiplier * slack|
};

} // namespace reasonlab::opt
