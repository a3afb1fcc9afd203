#pragma once

// Projected-gradient QP solver with KKT residual evaluation and duality-based
// problem reconstruction. The solver iterates x <- Proj(x - step * (Qx + c));
// multipliers are recovered afterwards by a least-squares stationarity fit on
// the active constraints (negative fits are pruned and refit).

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "reasonlab/errors.hpp"
#include "reasonlab/partial.hpp"
#include "reasonlab/opt/projection.hpp"
#include "reasonlab/opt/qp.hpp"

namespace reasonlab::opt {

struct SolveOptions {
    double step = 0.1;
    double tol = 1e-10;     // outer loop: stop when the step change is below this
    int max_iter = 5000;
    double divergence_bound = 1e8; // iterate norm beyond this counts as blow-up
    int dykstra_sweeps = 100;
    double dykstra_tol = 1e-10;
    double activity_tol = 1e-8;

    void validate() const {
        if (step <= 0) throw ConfigError("step must be positive");
        if (tol < 0) throw ConfigError("tol must be non-negative");
        if (max_iter < 1) throw ConfigError("max_iter must be positive");
    }
};

namespace detail {

// Least-squares multiplier fit over the active set, pruning negative
// multipliers until all remaining ones are non-negative.
inline void recover_multipliers(const QpProblem& problem, QpSolution& solution,
                                double activity_tol) {
    const int n = problem.dim();
    const VectorXd gradient = problem.Q * solution.x + problem.c;

    struct ActiveColumn {
        VectorXd direction;
        int kind; // 0 halfspace, 1 box lo, 2 box hi
        int index;
    };
    std::vector<ActiveColumn> columns;
    for (std::size_t i = 0; i < problem.halfspaces.size(); ++i) {
        const auto& h = problem.halfspaces[i];
        if (std::abs(h.normal.dot(solution.x) - h.offset) <= activity_tol)
            columns.push_back({h.normal, 0, static_cast<int>(i)});
    }
    if (problem.box) {
        for (int j = 0; j < n; ++j) {
            if (std::abs(solution.x[j] - problem.box->lo[j]) <= activity_tol)
                columns.push_back({-VectorXd::Unit(n, j), 1, j});
            else if (std::abs(solution.x[j] - problem.box->hi[j]) <= activity_tol)
                columns.push_back({VectorXd::Unit(n, j), 2, j});
        }
    }

    solution.halfspace_multipliers =
        VectorXd::Zero(static_cast<int>(problem.halfspaces.size()));
    solution.box_lo_multipliers = VectorXd::Zero(n);
    solution.box_hi_multipliers = VectorXd::Zero(n);

    // Stationarity: gradient + sum(multiplier * direction) = 0.
    while (!columns.empty()) {
        MatrixXd A(n, static_cast<int>(columns.size()));
        for (std::size_t k = 0; k < columns.size(); ++k)
            A.col(static_cast<int>(k)) = columns[k].direction;
        const VectorXd fit = A.completeOrthogonalDecomposition().solve(-gradient);

        int most_negative = -1;
        for (int k = 0; k < fit.size(); ++k)
            if (fit[k] < -1e-12 &&
                (most_negative < 0 || fit[k] < fit[most_negative]))
                most_negative = k;
        if (most_negative >= 0) {
            columns.erase(columns.begin() + most_negative);
            continue;
        }
        for (std::size_t k = 0; k < columns.size(); ++k) {
            const double value = std::max(fit[static_cast<int>(k)], 0.0);
            switch (columns[k].kind) {
                case 0: solution.halfspace_multipliers[columns[k].index] = value; break;
                case 1: solution.box_lo_multipliers[columns[k].index] = value; break;
                default: solution.box_hi_multipliers[columns[k].index] = value; break;
            }
        }
        break;
    }
}

} // namespace detail

// Returns Undefined when the feasible set is empty (Dykstra stalls infeasible
// AND a pairwise certificate confirms) and NonFinite when the iteration blows
// up -- the non-convergence witness path. A budget-exhausted but finite run
// comes back as a solution with converged = false.
inline Partial<QpSolution> solve_projected_gradient(const QpProblem& problem,
                                                    const SolveOptions& options) {
    problem.validate();
    options.validate();
    const int n = problem.dim();

    auto project = [&](const VectorXd& v) {
        VectorXd out = v;
        if (problem.box) out = clamp_to_box(*problem.box, out);
        if (!problem.halfspaces.empty())
            out = project_feasible(problem, out, options.dykstra_sweeps,
                                   options.dykstra_tol)
                      .point;
        return out;
    };

    // Feasibility probe before iterating.
    const auto feasibility =
        project_feasible(problem, VectorXd::Zero(n), options.dykstra_sweeps,
                         options.dykstra_tol);
    if (!feasibility.feasible && infeasibility_certificate(problem))
        return Partial<QpSolution>::undefined("feasible set is empty");

    QpSolution solution;
    solution.x = project(VectorXd::Zero(n));
    solution.objective_trace.push_back(qp_objective(problem, solution.x));

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const VectorXd gradient = problem.Q * solution.x + problem.c;
        const VectorXd next = project(solution.x - options.step * gradient);
        solution.iterations = iter;

        if (!next.allFinite() ||
            next.cwiseAbs().maxCoeff() > options.divergence_bound) {
            return Partial<QpSolution>::non_finite(
                "iterates diverged after " + std::to_string(iter) + " iterations");
        }

        const double movement = (next - solution.x).cwiseAbs().maxCoeff();
        solution.x = next;
        solution.objective_trace.push_back(qp_objective(problem, solution.x));
        if (movement <= options.tol) {
            solution.converged = true;
            break;
        }
    }

    detail::recover_multipliers(problem, solution, options.activity_tol);
    return solution;
}

inline KktResidual kkt_residual(const QpProblem& problem, const QpSolution& solution) {
    const int n = problem.dim();
    if (solution.x.size() != n)
        throw DimensionMismatch("solution dimension does not match problem");
    if (static_cast<int>(problem.halfspaces.size()) !=
        solution.halfspace_multipliers.size())
        throw DimensionMismatch("halfspace multiplier count mismatch");

    KktResidual residual;
    VectorXd stationarity = problem.Q * solution.x + problem.c;
    for (std::size_t i = 0; i < problem.halfspaces.size(); ++i) {
        const auto& h = problem.halfspaces[i];
        const double lambda = solution.halfspace_multipliers[static_cast<int>(i)];
        stationarity += lambda * h.normal;
        residual.comp_slack = std::max(
            residual.comp_slack, std::abs(lambda * (h.normal.dot(solution.x) - h.offset)));
    }
    if (problem.box) {
        for (int j = 0; j < n; ++j) {
            stationarity[j] += solution.box_hi_multipliers[j];
            stationarity[j] -= solution.box_lo_multipliers[j];
            if (std::isfinite(problem.box->hi[j]))
                residual.comp_slack = std::max(
                    residual.comp_slack,
                    std::abs(solution.box_hi_multipliers[j] *
                             (solution.x[j] - problem.box->hi[j])));
            if (std::isfinite(problem.box->lo[j]))
                residual.comp_slack = std::max(
                    residual.comp_slack,
                    std::abs(solution.box_lo_multipliers[j] *
                             (problem.box->lo[j] - solution.x[j])));
        }
    }
    residual.stationarity = stationarity.cwiseAbs().maxCoeff();
    residual.primal_infeas = max_violation(problem, solution.x);
    return residual;
}

// The generation map: keep the template's Q and constraint geometry, choose
// c' so the given solution is a KKT point of the reconstructed problem.
inline QpProblem reconstruct_problem(const QpSolution& solution,
                                     const QpProblem& geometry) {
    if (!solution.converged)
        throw NotConverged("reconstruction requires a converged solution");
    QpProblem out = geometry;
    VectorXd dual_terms = VectorXd::Zero(geometry.dim());
    for (std::size_t i = 0; i < geometry.halfspaces.size(); ++i)
        dual_terms += solution.halfspace_multipliers[static_cast<int>(i)] *
                      geometry.halfspaces[i].normal;
    dual_terms += solution.box_hi_multipliers - solution.box_lo_multipliers;
    out.c = -(geometry.Q * solution.x) - dual_terms;
    return out;
}

// Phenomenon-space distance for problem families: objective offset distance
// plus an indicator for mismatched geometry.
inline double problem_distance(const QpProblem& a, const QpProblem& b) {
    double d = (a.c - b.c).norm();
    if (!a.same_geometry(b)) d += 1.0;
    return d;
}

} // namespace reasonlab::opt
