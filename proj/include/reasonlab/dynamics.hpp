#pragma once

// Temporal behaviors of a reasoning system: the f(g(.)) refinement chain,
// error-driven adaptation through the instantiation's adapter hook, evolution
// of the principle system, and classification of how a system responds to
// failure across epochs. Adapt and evolve_principles mutate the system and
// must be externally serialized; trajectories are independent per start.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reasonlab/core.hpp"

namespace reasonlab {

// The iterate sequence e0, e1, ..., en with consecutive distances and a
// terminal outcome. len(deltas) == len(iterates) - 1 always.
template <typename E>
struct Trajectory {
    struct Converged {
        int steps = 0;
    };
    struct Cycle {
        int period = 0;
        int entry_index = 0;
    };
    struct Diverged {
        int step = 0;
    };
    struct Exhausted {
        std::string reason;
    };
    using Outcome = std::variant<Converged, Cycle, Diverged, Exhausted>;

    std::vector<E> iterates;
    std::vector<double> deltas;
    Outcome outcome = Exhausted{"not run"};

    bool converged() const { return std::holds_alternative<Converged>(outcome); }
    bool cycled() const { return std::holds_alternative<Cycle>(outcome); }
    bool diverged() const { return std::holds_alternative<Diverged>(outcome); }

    std::string outcome_name() const {
        if (converged()) return "converged";
        if (cycled()) return "cycle";
        if (diverged()) return "diverged";
        return "exhausted";
    }
};

// Runs e_n = f(g(e_{n-1})) from the given start until one of:
//  - convergence: consecutive distance <= convergence_tol;
//  - cycle: some earlier iterate lies within convergence_tol (full-history
//    scan with the metric, O(n^2) distances, fine at desk scale);
//  - divergence: a consecutive distance, the distance back to the start, or a
//    non-finite metric value exceeds divergence_bound;
//  - exhaustion: max_iterations reached, or a map came back Undefined
//    mid-chain (the reason is recorded).
template <typename P, typename E>
Trajectory<E> iterate_refinement(const ReasoningSystem<P, E>& system,
                                 const E& start, const ToleranceConfig& tol) {
    tol.validate();
    Trajectory<E> traj;
    traj.iterates.push_back(start);

    for (int step = 1; step <= tol.max_iterations; ++step) {
        const E& prev = traj.iterates.back();
        Partial<P> p = system.generate_map(prev);
        if (!p) {
            traj.outcome = typename Trajectory<E>::Exhausted{
                "generate undefined at step " + std::to_string(step) +
                (p.reason().empty() ? "" : ": " + p.reason())};
            return traj;
        }
        Partial<E> next = system.infer_map(*p);
        if (!next) {
            traj.outcome = typename Trajectory<E>::Exhausted{
                "infer undefined at step " + std::to_string(step) +
                (next.reason().empty() ? "" : ": " + next.reason())};
            return traj;
        }

        const double delta = system.explanations.distance(prev, *next);
        const double span = system.explanations.distance(traj.iterates.front(), *next);
        traj.iterates.push_back(*next);
        traj.deltas.push_back(delta);

        if (!std::isfinite(delta) || !std::isfinite(span) ||
            delta > tol.divergence_bound || span > tol.divergence_bound) {
            traj.outcome = typename Trajectory<E>::Diverged{step};
            return traj;
        }
        if (delta <= tol.convergence_tol) {
            traj.outcome = typename Trajectory<E>::Converged{step};
            return traj;
        }
        // Cycle scan against everything before the immediate predecessor.
        const int n = static_cast<int>(traj.iterates.size()) - 1;
        for (int i = 0; i < n - 1; ++i) {
            if (system.explanations.distance(traj.iterates[i], *next) <=
                tol.convergence_tol) {
                traj.outcome = typename Trajectory<E>::Cycle{n - i, i};
                return traj;
            }
        }
    }
    traj.outcome = typename Trajectory<E>::Exhausted{"max_iterations reached"};
    return traj;
}

// Where an adaptation run draws its calibration samples from and how hard it
// regularizes. Local scope restricts updates to a fixed phenomenon set.
template <typename P>
struct AdaptationPolicy {
    enum class Target { ReduceDelta, ReduceHardViolations };

    std::optional<std::vector<P>> local_scope; // nullopt = Global
    int max_rounds = 1;
    Target target = Target::ReduceDelta;
    double regularization_weight = 0.0;

    void validate() const {
        if (max_rounds < 1) throw ConfigError("max_rounds must be positive");
        if (regularization_weight < 0)
            throw ConfigError("regularization_weight must be non-negative");
        if (local_scope && local_scope->empty())
            throw ConfigError("Local scope requires a non-empty phenomenon set");
    }
};

struct AdaptSummary {
    double before_mean_delta = std::numeric_limits<double>::quiet_NaN();
    double after_mean_delta = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> round_mean_deltas; // mean delta after each round
    int rounds_completed = 0;
    // Filled for Local scope: deltas on a fresh global sample, before/after.
    std::optional<double> global_before_mean_delta;
    std::optional<double> global_after_mean_delta;
};

namespace detail {

template <typename P, typename E>
double mean_defined_delta(const ReasoningSystem<P, E>& system,
                          const std::vector<P>& samples) {
    double sum = 0.0;
    int count = 0;
    for (const auto& p : samples) {
        auto rec = roundtrip_discrepancy(system, p);
        if (rec.delta) {
            sum += *rec.delta;
            ++count;
        }
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count;
}

} // namespace detail

// Runs up to max_rounds of the instantiation's update procedure over the
// calibration set (policy-local or freshly sampled). The adapter's objective
// receives the policy's regularization weight only when the principle system
// actually carries Soft principles, so penalty-free systems update
// identically for any weight. Throws NoAdapter for systems without a hook and
// propagates NonFiniteUpdate (model left at its last good state).
template <typename P, typename E>
AdaptSummary adapt(ReasoningSystem<P, E>& system, const AdaptationPolicy<P>& policy,
                   std::uint64_t seed, int n_calibration) {
    policy.validate();
    if (!system.adapter)
        throw NoAdapter("system '" + system.id + "' exposes no adapter hook");
    if (!policy.local_scope && n_calibration < 1)
        throw ConfigError("n_calibration must be positive for Global scope");

    const std::vector<P> calibration =
        policy.local_scope ? *policy.local_scope
                           : system.phenomena.sample(derive_seed(seed, 0xADA7), n_calibration);

    std::vector<P> global_reference;
    if (policy.local_scope)
        global_reference =
            system.phenomena.sample(derive_seed(seed, 0x61077), std::max(n_calibration, 8));

    const double effective_weight =
        system.principles.has_soft_principles() ? policy.regularization_weight : 0.0;

    AdaptSummary summary;
    summary.before_mean_delta = detail::mean_defined_delta(system, calibration);
    if (policy.local_scope)
        summary.global_before_mean_delta =
            detail::mean_defined_delta(system, global_reference);

    for (int round = 0; round < policy.max_rounds; ++round) {
        system.adapter->update_round(calibration, effective_weight);
        ++summary.rounds_completed;
        summary.round_mean_deltas.push_back(
            detail::mean_defined_delta(system, calibration));
    }

    summary.after_mean_delta = detail::mean_defined_delta(system, calibration);
    if (policy.local_scope)
        summary.global_after_mean_delta =
            detail::mean_defined_delta(system, global_reference);
    system.adapter->calibration = calibration;
    return summary;
}

enum class DriftCause { ContradictionRate, PerformanceFloor, Manual };
enum class DriftActionKind { DemoteHardToSoft, DropPrinciple, AddPrinciple };

inline const char* to_string(DriftCause c) {
    switch (c) {
        case DriftCause::ContradictionRate: return "contradiction_rate";
        case DriftCause::PerformanceFloor: return "performance_floor";
        default: return "manual";
    }
}

inline const char* to_string(DriftActionKind k) {
    switch (k) {
        case DriftActionKind::DemoteHardToSoft: return "demote_hard_to_soft";
        case DriftActionKind::DropPrinciple: return "drop_principle";
        default: return "add_principle";
    }
}

// One applied drift action, recorded with enough detail to replay it.
template <typename P, typename E>
struct DriftTrigger {
    DriftCause cause = DriftCause::Manual;
    double metric = 0.0;
    int timestamp = 0;
    DriftActionKind action = DriftActionKind::DemoteHardToSoft;
    std::string principle_id;
    std::optional<Principle<P, E>> added; // payload for AddPrinciple replay
};

// The evolution Pi_0 -> Pi_1 -> ... -> Pi_t: snapshots plus the trigger log
// that produced them. versions[0] is always Pi_0; triggers[i] produced
// versions[i+1].
template <typename P, typename E>
struct DriftHistory {
    explicit DriftHistory(PrincipleSystem<P, E> initial) {
        versions.push_back(std::move(initial));
    }

    std::vector<PrincipleSystem<P, E>> versions;
    std::vector<DriftTrigger<P, E>> triggers;

    const PrincipleSystem<P, E>& current() const { return versions.back(); }
};

// Diagnostic observations driving a drift evaluation: the fraction of samples
// whose explanation Hard-violated the principles, the mean round-trip delta,
// and which principle ids were seen violated.
struct DriftSignals {
    double contradiction_rate = 0.0;
    double mean_delta = 0.0;
    std::vector<std::string> violated_principle_ids;
    std::optional<int> timestamp; // defaults to the number of prior triggers
};

template <typename P, typename E>
struct DriftPolicy {
    enum class Action { Relax, Tighten };

    double contradiction_rate_threshold = 1.0; // in (0, 1]
    double performance_floor = std::numeric_limits<double>::infinity();
    Action on_contradiction = Action::Relax;
    Action on_performance = Action::Relax;
    std::optional<Principle<P, E>> tightening_principle;
    bool manual_trigger = false;
    Action manual_action = Action::Tighten;

    void validate() const {
        if (contradiction_rate_threshold <= 0 || contradiction_rate_threshold > 1)
            throw ConfigError("contradiction_rate_threshold must be in (0, 1]");
        if (performance_floor < 0)
            throw ConfigError("performance_floor must be non-negative");
    }
};

namespace detail {

// Relax: demote the first violated Hard principle to Soft, else drop the
// first violated Soft one. EmptyRelaxation when nothing violated remains.
template <typename P, typename E>
DriftTrigger<P, E> relax_action(const PrincipleSystem<P, E>& pi,
                                const std::vector<std::string>& violated_ids) {
    for (const auto& principle : pi.principles()) {
        if (principle.severity() != Severity::Hard) continue;
        for (const auto& id : violated_ids) {
            if (id == principle.id()) {
                DriftTrigger<P, E> t;
                t.action = DriftActionKind::DemoteHardToSoft;
                t.principle_id = id;
                return t;
            }
        }
    }
    for (const auto& principle : pi.principles()) {
        if (principle.severity() != Severity::Soft) continue;
        for (const auto& id : violated_ids) {
            if (id == principle.id()) {
                DriftTrigger<P, E> t;
                t.action = DriftActionKind::DropPrinciple;
                t.principle_id = id;
                return t;
            }
        }
    }
    throw EmptyRelaxation("Relax triggered but no violated principle to demote or drop");
}

template <typename P, typename E>
PrincipleSystem<P, E> apply_drift_action(const PrincipleSystem<P, E>& pi,
                                         const DriftTrigger<P, E>& trigger) {
    std::vector<Principle<P, E>> next;
    switch (trigger.action) {
        case DriftActionKind::DemoteHardToSoft:
            for (const auto& p : pi.principles())
                next.push_back(p.id() == trigger.principle_id ? p.demoted_to_soft() : p);
            break;
        case DriftActionKind::DropPrinciple:
            for (const auto& p : pi.principles())
                if (p.id() != trigger.principle_id) next.push_back(p);
            break;
        case DriftActionKind::AddPrinciple:
            next = pi.principles();
            if (!trigger.added)
                throw ConfigError("AddPrinciple trigger without a principle payload");
            next.push_back(*trigger.added);
            break;
    }
    return pi.evolved(std::move(next));
}

} // namespace detail

// Evaluates the drift policy against the latest diagnostics and applies at
// most one action (manual > contradiction rate > performance floor, so
// histories stay replayable). On trigger: the system's principles are
// replaced by the evolved successor, the snapshot and trigger are appended to
// the history, and the new system is returned. No trigger leaves everything
// untouched.
template <typename P, typename E>
const PrincipleSystem<P, E>& evolve_principles(ReasoningSystem<P, E>& system,
                                               DriftHistory<P, E>& history,
                                               const DriftPolicy<P, E>& policy,
                                               const DriftSignals& signals) {
    policy.validate();
    using Action = typename DriftPolicy<P, E>::Action;

    std::optional<DriftCause> cause;
    double metric = 0.0;
    Action action = Action::Relax;
    if (policy.manual_trigger) {
        cause = DriftCause::Manual;
        action = policy.manual_action;
    } else if (signals.contradiction_rate > policy.contradiction_rate_threshold) {
        cause = DriftCause::ContradictionRate;
        metric = signals.contradiction_rate;
        action = policy.on_contradiction;
    } else if (signals.mean_delta > policy.performance_floor) {
        cause = DriftCause::PerformanceFloor;
        metric = signals.mean_delta;
        action = policy.on_performance;
    }
    if (!cause) return system.principles;

    DriftTrigger<P, E> trigger;
    if (action == Action::Relax) {
        trigger = detail::relax_action(system.principles, signals.violated_principle_ids);
    } else {
        if (!policy.tightening_principle)
            throw ConfigError("Tighten action requires a tightening_principle");
        trigger.action = DriftActionKind::AddPrinciple;
        trigger.principle_id = policy.tightening_principle->id();
        trigger.added = policy.tightening_principle;
    }
    trigger.cause = *cause;
    trigger.metric = metric;
    trigger.timestamp = signals.timestamp.value_or(
        static_cast<int>(history.triggers.size()));

    system.principles = detail::apply_drift_action(system.principles, trigger);
    history.versions.push_back(system.principles);
    history.triggers.push_back(std::move(trigger));
    return system.principles;
}

// Replays a trigger log from Pi_0; the result must match the final recorded
// snapshot exactly (signature equality).
template <typename P, typename E>
PrincipleSystem<P, E> replay_drift(const PrincipleSystem<P, E>& initial,
                                   const std::vector<DriftTrigger<P, E>>& triggers) {
    PrincipleSystem<P, E> pi = initial;
    for (const auto& trigger : triggers)
        pi = detail::apply_drift_action(pi, trigger);
    return pi;
}

// Per-epoch observations used to classify a system's failure-response mode.
struct EpochStats {
    double mean_delta = 0.0;
    double undefined_rate = 0.0; // fraction of samples with undefined delta
    int principle_version = 0;
    bool non_finite_update = false; // adapt threw NonFiniteUpdate this epoch
};

struct RunLog {
    std::vector<EpochStats> epochs;
    double convergence_tol = 1e-9;
};

enum class ResponseMode { Static, Collapsing, Adaptive };

inline const char* to_string(ResponseMode m) {
    switch (m) {
        case ResponseMode::Static: return "static";
        case ResponseMode::Collapsing: return "collapsing";
        default: return "adaptive";
    }
}

// Collapsing wins over Static: a run that aborted in a non-finite update is a
// collapse even when the recorded deltas never moved.
inline ResponseMode classify_response_mode(const RunLog& log) {
    if (log.epochs.size() < 2)
        throw InsufficientLog("response-mode classification needs >= 2 epochs");

    bool non_finite = false;
    for (const auto& epoch : log.epochs) non_finite |= epoch.non_finite_update;
    const double rate_increase =
        log.epochs.back().undefined_rate - log.epochs.front().undefined_rate;
    if (non_finite || rate_increase > 0.25) return ResponseMode::Collapsing;

    bool delta_static = true;
    bool version_static = true;
    for (const auto& epoch : log.epochs) {
        if (std::abs(epoch.mean_delta - log.epochs.front().mean_delta) >
            log.convergence_tol)
            delta_static = false;
        if (epoch.principle_version != log.epochs.front().principle_version)
            version_static = false;
    }
    if (delta_static && version_static) return ResponseMode::Static;
    return ResponseMode::Adaptive;
}

} // namespace reasonlab
