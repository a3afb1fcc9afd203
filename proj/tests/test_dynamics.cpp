#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "reasonlab/dynamics.hpp"
#include "reasonlab/systems/analytic.hpp"

using namespace reasonlab;

namespace {

ToleranceConfig tight_tol() {
    ToleranceConfig tol;
    tol.convergence_tol = 1e-12;
    tol.divergence_bound = 1e6;
    tol.max_iterations = 1000;
    return tol;
}

// Reasoning system over {0..k-1} with the discrete metric and f given by a
// lookup table; used for the pigeonhole exhaustion test.
ReasoningSystem<int, int> table_system(std::vector<int> table) {
    ReasoningSystem<int, int> system;
    system.id = "table";
    const int k = static_cast<int>(table.size());
    system.phenomena.id = "table.P";
    system.phenomena.admissible = [k](const int& p) { return p >= 0 && p < k; };
    system.phenomena.sample = [k](std::uint64_t seed, int n) {
        Rng rng(seed);
        std::vector<int> out;
        for (int i = 0; i < n; ++i) out.push_back(static_cast<int>(rng.below(k)));
        return out;
    };
    system.phenomena.distance = [](const int& a, const int& b) {
        return a == b ? 0.0 : 1.0;
    };
    system.explanations.id = "table.E";
    system.explanations.distance = system.phenomena.distance;
    system.explanations.is_trivial = [](const int&) { return false; };
    system.infer_map = [table = std::move(table)](const int& p) -> Partial<int> {
        return table[static_cast<std::size_t>(p)];
    };
    system.generate_map = [](const int& e) -> Partial<int> { return e; };
    return system;
}

// Scalar model e = w * p with a gradient adapter; delta = |p - w p|, so the
// loss is quadratic in w and every small-step round reduces it.
struct ScalarModel {
    double w = 0.0;
    double lr = 0.05;
};

ReasoningSystem<double, double> trainable_scalar_system(std::shared_ptr<ScalarModel> model) {
    auto system = analytic::function_system(
        "scalar", [model](double p) { return model->w * p; },
        [](double e) { return e; });
    system.stateful = true;
    system.adapter = std::make_shared<Adapter<double>>();
    system.adapter->update_round = [model](const std::vector<double>& batch,
                                           double reg_weight) {
        double grad = 0.0;
        for (double p : batch) grad += -(p - model->w * p) * p;
        grad = grad / static_cast<double>(batch.size()) + reg_weight * 2.0 * model->w;
        const double next = model->w - model->lr * grad;
        if (!std::isfinite(next)) throw NonFiniteUpdate("scalar weight overflow");
        model->w = next;
    };
    return system;
}

} // namespace

TEST_CASE("identity system converges in one step from any start") {
    auto system = analytic::identity_system();
    for (double start : {-4.0, 0.0, 9.5}) {
        auto traj = iterate_refinement(system, start, tight_tol());
        REQUIRE(traj.converged());
        REQUIRE(std::get<Trajectory<double>::Converged>(traj.outcome).steps == 1);
        REQUIRE(traj.iterates.size() == 2);
        REQUIRE(traj.deltas.size() == 1);
    }
}

TEST_CASE("negation chain is a period-2 cycle") {
    auto system = analytic::function_system(
        "negation", [](double p) { return p; }, [](double e) { return -e; });
    auto traj = iterate_refinement(system, 1.0, tight_tol());
    REQUIRE(traj.cycled());
    auto cycle = std::get<Trajectory<double>::Cycle>(traj.outcome);
    REQUIRE(cycle.period == 2);
    REQUIRE(cycle.entry_index == 0);
}

TEST_CASE("doubling chain diverges when the span crosses the bound") {
    auto system = analytic::function_system(
        "doubling", [](double p) { return p; }, [](double e) { return 2.0 * e; });
    auto traj = iterate_refinement(system, 1.0, tight_tol());
    REQUIRE(traj.diverged());
    // iterates are 2^n; |2^n - 1| first exceeds 1e6 at n = 20.
    REQUIRE(std::get<Trajectory<double>::Diverged>(traj.outcome).step == 20);
}

TEST_CASE("undefined map mid-chain exhausts with a recorded reason") {
    auto system = analytic::identity_system();
    system.generate_map = [](const double& e) -> Partial<double> {
        if (e > 2.0) return Partial<double>::undefined("out of range");
        return e + 1.0;
    };
    auto traj = iterate_refinement(system, 0.0, tight_tol());
    auto exhausted = std::get<Trajectory<double>::Exhausted>(traj.outcome);
    REQUIRE(exhausted.reason.find("generate undefined") != std::string::npos);
    REQUIRE(exhausted.reason.find("out of range") != std::string::npos);
}

TEST_CASE("trajectory lengths stay consistent and outcomes are deterministic") {
    auto system = analytic::function_system(
        "damped", [](double p) { return p; }, [](double e) { return 0.5 * e; });
    auto a = iterate_refinement(system, 3.0, tight_tol());
    auto b = iterate_refinement(system, 3.0, tight_tol());
    REQUIRE(a.deltas.size() == a.iterates.size() - 1);
    REQUIRE(a.outcome_name() == b.outcome_name());
    REQUIRE(a.iterates == b.iterates);
}

TEST_CASE("converged trajectories respect the fixed-point residual bound") {
    ToleranceConfig tol = tight_tol();
    tol.convergence_tol = 1e-6;
    for (double factor : {0.5, 0.9, -0.3}) {
        auto system = analytic::function_system(
            "contraction", [](double p) { return p; },
            [factor](double e) { return factor * e; });
        auto traj = iterate_refinement(system, 1.0, tol);
        REQUIRE(traj.converged());
        const double last = traj.iterates.back();
        const double residual = std::abs(last - factor * last);
        REQUIRE(residual <= 2.0 * tol.convergence_tol);
    }
}

TEST_CASE("finite explanation spaces always converge or cycle within |E| steps") {
    ToleranceConfig tol;
    tol.convergence_tol = 0.0;
    tol.divergence_bound = 10.0;
    tol.max_iterations = 65; // |E| + 1 at the largest size

    for (int k : {1, 2, 3, 8, 33, 64}) {
        Rng rng(derive_seed(kDefaultSeed, static_cast<std::uint64_t>(k)));
        for (int trial = 0; trial < 4; ++trial) {
            std::vector<int> table(static_cast<std::size_t>(k));
            for (auto& v : table) v = static_cast<int>(rng.below(k));
            auto system = table_system(table);
            for (int start = 0; start < k; ++start) {
                auto traj = iterate_refinement(system, start, tol);
                INFO("k=" << k << " start=" << start);
                REQUIRE((traj.converged() || traj.cycled()));
                REQUIRE(traj.iterates.size() <= static_cast<std::size_t>(k) + 1);
            }
        }
    }
}

TEST_CASE("adapt requires an adapter hook") {
    auto system = analytic::identity_system();
    AdaptationPolicy<double> policy;
    REQUIRE_THROWS_AS(adapt(system, policy, kDefaultSeed, 10), NoAdapter);
}

TEST_CASE("adapt reduces the round-trip delta of the scalar model") {
    auto model = std::make_shared<ScalarModel>();
    auto system = trainable_scalar_system(model);

    AdaptationPolicy<double> policy;
    policy.max_rounds = 60;
    auto summary = adapt(system, policy, kDefaultSeed, 16);

    REQUIRE(summary.rounds_completed == 60);
    REQUIRE(summary.after_mean_delta < summary.before_mean_delta);
    REQUIRE(summary.after_mean_delta < 0.05);
    REQUIRE(system.adapter->calibration.size() == 16);
}

TEST_CASE("local adaptation reports both local and global deltas") {
    auto model = std::make_shared<ScalarModel>();
    auto system = trainable_scalar_system(model);

    AdaptationPolicy<double> policy;
    policy.local_scope = std::vector<double>{2.0};
    policy.max_rounds = 80;
    auto summary = adapt(system, policy, kDefaultSeed, 8);

    REQUIRE(summary.after_mean_delta < summary.before_mean_delta);
    REQUIRE(summary.global_before_mean_delta.has_value());
    REQUIRE(summary.global_after_mean_delta.has_value());
}

TEST_CASE("regularization weight is inert without soft principles") {
    auto model_a = std::make_shared<ScalarModel>();
    auto model_b = std::make_shared<ScalarModel>();
    auto system_a = trainable_scalar_system(model_a);
    auto system_b = trainable_scalar_system(model_b);

    AdaptationPolicy<double> policy;
    policy.max_rounds = 20;
    policy.regularization_weight = 0.0;
    adapt(system_a, policy, 99, 8);
    policy.regularization_weight = 5.0;
    adapt(system_b, policy, 99, 8);
    REQUIRE(model_a->w == model_b->w); // no soft principles: identical updates

    // With a soft principle present the penalty term must change the updates.
    auto model_c = std::make_shared<ScalarModel>();
    auto system_c = trainable_scalar_system(model_c);
    system_c.principles = PrincipleSystem<double, double>({
        Principle<double, double>::on_explanation(
            "weight_penalty", Severity::Soft,
            [](const double&) { return Verdict::Violated; }, 1.0),
    });
    adapt(system_c, policy, 99, 8);
    REQUIRE(model_c->w != model_b->w);
}

TEST_CASE("non-finite updates propagate and leave the model at its last state") {
    auto model = std::make_shared<ScalarModel>();
    model->lr = 1e200; // guarantees overflow on the first round
    auto system = trainable_scalar_system(model);

    AdaptationPolicy<double> policy;
    policy.max_rounds = 3;
    REQUIRE_THROWS_AS(adapt(system, policy, kDefaultSeed, 4), NonFiniteUpdate);
    REQUIRE(std::isfinite(model->w));
}

namespace {

PrincipleSystem<double, double> logicless_pi() {
    return PrincipleSystem<double, double>({
        Principle<double, double>::on_explanation(
            "consistency", Severity::Hard,
            [](const double& e) {
                return e >= 0 ? Verdict::Satisfied : Verdict::Violated;
            }),
        Principle<double, double>::on_explanation(
            "brevity", Severity::Soft,
            [](const double& e) {
                return std::abs(e) < 5 ? Verdict::Satisfied : Verdict::Violated;
            },
            0.5),
    });
}

} // namespace

TEST_CASE("no trigger leaves the principle system untouched") {
    auto system = analytic::identity_system();
    system.principles = logicless_pi();
    DriftHistory<double, double> history(system.principles);
    DriftPolicy<double, double> policy;
    policy.contradiction_rate_threshold = 0.2;

    DriftSignals signals;
    signals.contradiction_rate = 0.0;
    evolve_principles(system, history, policy, signals);

    REQUIRE(system.principles.version() == 0);
    REQUIRE(history.versions.size() == 1);
    REQUIRE(history.triggers.empty());
}

TEST_CASE("contradiction trigger relaxes the violated hard principle") {
    auto system = analytic::identity_system();
    system.principles = logicless_pi();
    DriftHistory<double, double> history(system.principles);
    DriftPolicy<double, double> policy;
    policy.contradiction_rate_threshold = 0.2;

    DriftSignals signals;
    signals.contradiction_rate = 1.0;
    signals.violated_principle_ids = {"consistency"};
    evolve_principles(system, history, policy, signals);

    REQUIRE(system.principles.version() == 1);
    REQUIRE(system.principles.find("consistency")->severity() == Severity::Soft);
    REQUIRE(history.triggers.size() == 1);
    REQUIRE(history.triggers[0].cause == DriftCause::ContradictionRate);
    REQUIRE(history.triggers[0].action == DriftActionKind::DemoteHardToSoft);
}

TEST_CASE("relax with no violated principles is an error") {
    auto system = analytic::identity_system();
    system.principles = logicless_pi();
    DriftHistory<double, double> history(system.principles);
    DriftPolicy<double, double> policy;
    policy.contradiction_rate_threshold = 0.5;

    DriftSignals signals;
    signals.contradiction_rate = 0.9;
    signals.violated_principle_ids = {};
    REQUIRE_THROWS_AS(evolve_principles(system, history, policy, signals),
                      EmptyRelaxation);
}

TEST_CASE("two successive triggers produce versions 0 -> 1 -> 2") {
    auto system = analytic::identity_system();
    system.principles = logicless_pi();
    DriftHistory<double, double> history(system.principles);

    DriftPolicy<double, double> policy;
    policy.contradiction_rate_threshold = 0.2;

    DriftSignals first;
    first.contradiction_rate = 0.9;
    first.violated_principle_ids = {"consistency"};
    evolve_principles(system, history, policy, first);

    DriftSignals second;
    second.contradiction_rate = 0.9;
    second.violated_principle_ids = {"consistency", "brevity"};
    evolve_principles(system, history, policy, second);

    REQUIRE(system.principles.version() == 2);
    REQUIRE(history.versions.size() == 3);
    REQUIRE(history.triggers.size() == 2);
    // Second relax finds no violated Hard principle left, so it drops the
    // first violated Soft one in declaration order (the demoted consistency).
    REQUIRE(history.triggers[1].action == DriftActionKind::DropPrinciple);
    REQUIRE(system.principles.find("consistency") == nullptr);
    REQUIRE(system.principles.find("brevity") != nullptr);
}

TEST_CASE("manual tighten adds the supplied principle") {
    auto system = analytic::identity_system();
    system.principles = logicless_pi();
    DriftHistory<double, double> history(system.principles);

    DriftPolicy<double, double> policy;
    policy.manual_trigger = true;
    policy.manual_action = DriftPolicy<double, double>::Action::Tighten;
    policy.tightening_principle = Principle<double, double>::on_explanation(
        "finite", Severity::Hard,
        [](const double& e) {
            return std::isfinite(e) ? Verdict::Satisfied : Verdict::Violated;
        });

    evolve_principles(system, history, policy, DriftSignals{});
    REQUIRE(system.principles.version() == 1);
    REQUIRE(system.principles.find("finite") != nullptr);
    REQUIRE(history.triggers[0].cause == DriftCause::Manual);
}

TEST_CASE("replaying the trigger log reproduces the final principle system") {
    auto system = analytic::identity_system();
    system.principles = logicless_pi();
    const auto pi0 = system.principles;
    DriftHistory<double, double> history(pi0);

    DriftPolicy<double, double> policy;
    policy.contradiction_rate_threshold = 0.2;
    DriftSignals signals;
    signals.contradiction_rate = 1.0;
    signals.violated_principle_ids = {"consistency"};
    evolve_principles(system, history, policy, signals);

    policy.manual_trigger = true;
    policy.manual_action = DriftPolicy<double, double>::Action::Tighten;
    policy.tightening_principle = Principle<double, double>::on_explanation(
        "finite", Severity::Hard,
        [](const double& e) {
            return std::isfinite(e) ? Verdict::Satisfied : Verdict::Violated;
        });
    evolve_principles(system, history, policy, DriftSignals{});

    auto replayed = replay_drift(pi0, history.triggers);
    REQUIRE(replayed == history.current());
    REQUIRE(history.triggers.size() ==
            static_cast<std::size_t>(history.current().version()));
}

TEST_CASE("response mode needs at least two epochs") {
    RunLog log;
    log.epochs.push_back({0.1, 0.0, 0, false});
    REQUIRE_THROWS_AS(classify_response_mode(log), InsufficientLog);
}

TEST_CASE("frozen system is static") {
    RunLog log;
    log.convergence_tol = 1e-9;
    for (int i = 0; i < 3; ++i) log.epochs.push_back({0.25, 0.0, 0, false});
    REQUIRE(classify_response_mode(log) == ResponseMode::Static);
}

TEST_CASE("decreasing delta is adaptive") {
    RunLog log;
    log.epochs.push_back({0.9, 0.0, 0, false});
    log.epochs.push_back({0.4, 0.0, 0, false});
    log.epochs.push_back({0.1, 0.0, 0, false});
    REQUIRE(classify_response_mode(log) == ResponseMode::Adaptive);
}

TEST_CASE("principle drift alone also counts as adaptive") {
    RunLog log;
    log.epochs.push_back({0.5, 0.0, 0, false});
    log.epochs.push_back({0.5, 0.0, 1, false});
    REQUIRE(classify_response_mode(log) == ResponseMode::Adaptive);
}

TEST_CASE("collapse wins over static") {
    RunLog log;
    log.epochs.push_back({0.5, 0.0, 0, false});
    log.epochs.push_back({0.5, 0.0, 0, true}); // non-finite update epoch
    REQUIRE(classify_response_mode(log) == ResponseMode::Collapsing);

    RunLog rate;
    rate.epochs.push_back({0.5, 0.1, 0, false});
    rate.epochs.push_back({0.5, 0.5, 0, false}); // undefined-rate jumped 0.4
    REQUIRE(classify_response_mode(rate) == ResponseMode::Collapsing);
}
