#pragma once

// The constrained-optimization reasoning system. Phenomena are QP problems
// drawn from a fixed-geometry family (shared Q and constraints, varying c);
// inference solves by projected gradient, generation reconstructs the
// objective offset from the solution and its multipliers, and the principles
// are the three KKT residuals with a Hard threshold.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "reasonlab/core.hpp"
#include "reasonlab/opt/solver.hpp"

namespace reasonlab::opt {

struct OptSystemConfig {
    QpProblem geometry;      // Q + constraints; geometry.c is the family mean
    double c_sigma = 1.0;    // sampled c = mean + sigma * standard normal
    double step_scale = 1.0; // step = step_scale / lambda_max(Q)
    double solve_tol = 1e-10;
    int max_iter = 5000;
    double divergence_bound = 1e8;
    double kkt_hard_tol = 1e-6;
};

using OptSystem = ReasoningSystem<QpProblem, QpSolution>;

inline OptSystem make_opt_system(OptSystemConfig cfg) {
    cfg.geometry.validate();
    const double lambda_max = cfg.geometry.max_eigenvalue();
    if (lambda_max <= 0)
        throw ConfigError("geometry Q must have a positive leading eigenvalue");

    SolveOptions options;
    options.step = cfg.step_scale / lambda_max;
    options.tol = cfg.solve_tol;
    options.max_iter = cfg.max_iter;
    options.divergence_bound = cfg.divergence_bound;

    OptSystem system;
    system.id = "opt";
    system.stateful = false;

    system.phenomena.id = "opt.problems";
    system.phenomena.admissible = [](const QpProblem& p) {
        try {
            p.validate();
        } catch (const Error&) {
            return false;
        }
        // Convexity belongs to admissibility: PSD up to an eigenvalue floor.
        return p.min_eigenvalue() >= -1e-10;
    };
    system.phenomena.distance = problem_distance;
    system.phenomena.sample = [cfg](std::uint64_t seed, int n) {
        Rng rng(seed);
        std::vector<QpProblem> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) {
            QpProblem p = cfg.geometry;
            for (int j = 0; j < p.c.size(); ++j)
                p.c[j] += cfg.c_sigma * rng.normal();
            out.push_back(std::move(p));
        }
        return out;
    };
    system.phenomena.perturb = [](const QpProblem& p, double radius, Rng& rng) {
        QpProblem out = p;
        VectorXd direction(p.c.size());
        for (int j = 0; j < direction.size(); ++j) direction[j] = rng.normal();
        if (direction.norm() > 0)
            out.c += (radius * rng.uniform()) * direction.normalized();
        return out;
    };

    system.explanations.id = "opt.solutions";
    system.explanations.distance = [](const QpSolution& a, const QpSolution& b) {
        return (a.x - b.x).norm();
    };
    system.explanations.is_trivial = [](const QpSolution&) { return false; };

    system.infer_map = [options](const QpProblem& p) -> Partial<QpSolution> {
        return solve_projected_gradient(p, options);
    };
    system.generate_map = [geometry = cfg.geometry](const QpSolution& e)
        -> Partial<QpProblem> {
        if (!e.converged)
            return Partial<QpProblem>::undefined("solution did not converge");
        return reconstruct_problem(e, geometry);
    };

    const double hard_tol = cfg.kkt_hard_tol;
    system.principles = PrincipleSystem<QpProblem, QpSolution>({
        Principle<QpProblem, QpSolution>::on_pair(
            "kkt_stationarity", Severity::Hard,
            [hard_tol](const QpSolution& e, const QpProblem& p) {
                return kkt_residual(p, e).stationarity <= hard_tol
                           ? Verdict::Satisfied
                           : Verdict::Violated;
            }),
        Principle<QpProblem, QpSolution>::on_pair(
            "kkt_primal_feasibility", Severity::Hard,
            [hard_tol](const QpSolution& e, const QpProblem& p) {
                return kkt_residual(p, e).primal_infeas <= hard_tol
                           ? Verdict::Satisfied
                           : Verdict::Violated;
            }),
        Principle<QpProblem, QpSolution>::on_pair(
            "kkt_complementary_slackness", Severity::Hard,
            [hard_tol](const QpSolution& e, const QpProblem& p) {
                return kkt_residual(p, e).comp_slack <= hard_tol
                           ? Verdict::Satisfied
                           : Verdict::Violated;
            }),
    });
    return system;
}

// Random strictly convex problem for tests and demos: Q = M'M + mu*I.
inline QpProblem random_strictly_convex(Rng& rng, int n, double mu_floor = 0.5) {
    MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = rng.normal();
    QpProblem p;
    p.Q = m.transpose() * m + (mu_floor + rng.uniform()) * MatrixXd::Identity(n, n);
    p.Q = ((p.Q + p.Q.transpose()) / 2.0).eval();
    p.c = VectorXd(n);
    for (int j = 0; j < n; ++j) p.c[j] = rng.normal();
    return p;
}

} // namespace reasonlab::opt
