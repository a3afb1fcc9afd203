#pragma once

// Projection onto the feasible set: exact clamping for the box, analytic
// projection per halfspace, and Dykstra's alternating scheme for the
// intersection. Dykstra (unlike plain alternating projection) converges to
// the true nearest point of the intersection, which the solver relies on.

#include <Eigen/Dense>
#include <cmath>

#include "reasonlab/opt/qp.hpp"

namespace reasonlab::opt {

inline VectorXd clamp_to_box(const Box& box, VectorXd x) {
    for (int j = 0; j < x.size(); ++j)
        x[j] = std::min(std::max(x[j], box.lo[j]), box.hi[j]);
    return x;
}

inline VectorXd project_halfspace(const Halfspace& h, VectorXd x) {
    const double violation = h.normal.dot(x) - h.offset;
    if (violation <= 0) return x;
    return x - (violation / h.normal.squaredNorm()) * h.normal;
}

// Worst violation of any constraint at x (0 when feasible).
inline double max_violation(const QpProblem& problem, const VectorXd& x) {
    double worst = 0.0;
    if (problem.box) {
        for (int j = 0; j < x.size(); ++j) {
            worst = std::max(worst, problem.box->lo[j] - x[j]);
            worst = std::max(worst, x[j] - problem.box->hi[j]);
        }
    }
    for (const auto& h : problem.halfspaces)
        worst = std::max(worst, h.normal.dot(x) - h.offset);
    return worst;
}

struct DykstraResult {
    VectorXd point;
    int sweeps = 0;
    bool feasible = false; // reached the intersection within tolerance
};

inline DykstraResult project_feasible(const QpProblem& problem, const VectorXd& x0,
                                      int max_sweeps = 100, double tol = 1e-10) {
    const bool has_box = problem.box.has_value();
    const std::size_t sets = problem.halfspaces.size() + (has_box ? 1 : 0);
    DykstraResult result{x0, 0, false};
    if (sets == 0) {
        result.feasible = true;
        return result;
    }

    std::vector<VectorXd> corrections(sets, VectorXd::Zero(x0.size()));
    VectorXd x = x0;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        const VectorXd before = x;
        std::size_t set_index = 0;
        if (has_box) {
            const VectorXd y = clamp_to_box(*problem.box, x + corrections[set_index]);
            corrections[set_index] = x + corrections[set_index] - y;
            x = y;
            ++set_index;
        }
        for (const auto& h : problem.halfspaces) {
            const VectorXd y = project_halfspace(h, x + corrections[set_index]);
            corrections[set_index] = x + corrections[set_index] - y;
            x = y;
            ++set_index;
        }
        result.sweeps = sweep;
        if ((x - before).cwiseAbs().maxCoeff() <= tol) break;
    }
    result.point = x;
    result.feasible = max_violation(problem, x) <= 1e-8;
    return result;
}

// Pairwise infeasibility certificates: a halfspace whose minimum over the box
// still violates it, or two anti-parallel halfspaces with disjoint slabs.
// Heuristic by design; it confirms emptiness, it cannot refute it.
inline bool infeasibility_certificate(const QpProblem& problem) {
    const int n = problem.dim();
    if (problem.box) {
        for (const auto& h : problem.halfspaces) {
            double lowest = 0.0;
            bool unbounded = false;
            for (int j = 0; j < n; ++j) {
                const double bound = h.normal[j] > 0 ? problem.box->lo[j]
                                                     : problem.box->hi[j];
                if (h.normal[j] != 0 && std::isinf(bound)) {
                    unbounded = true;
                    break;
                }
                lowest += h.normal[j] * bound;
            }
            if (!unbounded && lowest > h.offset + 1e-12) return true;
        }
    }
    for (std::size_t i = 0; i < problem.halfspaces.size(); ++i) {
        for (std::size_t j = i + 1; j < problem.halfspaces.size(); ++j) {
            const auto& hi = problem.halfspaces[i];
            const auto& hj = problem.halfspaces[j];
            const VectorXd u = hi.normal.normalized();
            const VectorXd v = hj.normal.normalized();
            if ((u + v).norm() > 1e-9) continue; // not anti-parallel
            if (hi.offset / hi.normal.norm() + hj.offset / hj.normal.norm() < -1e-12)
                return true;
        }
    }
    return false;
}

} // namespace reasonlab::opt
