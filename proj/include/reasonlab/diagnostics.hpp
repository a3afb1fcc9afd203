#pragma once

// Sampling-based evaluation of a reasoning system: the three criteria
// (coherence, soundness, completeness), the fixed-point idealization, the
// failure-mode classifier, and the joint scorecard. All checks draw the same
// deterministic sample set for a given seed, so their per-sample findings are
// directly comparable; spaces exposing an enumerate hook with fewer than
// 10,000 elements are checked exhaustively instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reasonlab/core.hpp"
#include "reasonlab/dynamics.hpp"

namespace reasonlab {

enum class Criterion { Coherence, Soundness, Completeness, FixedPoint };

inline const char* to_string(Criterion c) {
    switch (c) {
        case Criterion::Coherence: return "coherence";
        case Criterion::Soundness: return "soundness";
        case Criterion::Completeness: return "completeness";
        default: return "fixedpoint";
    }
}

template <typename P>
struct FailingSample {
    P phenomenon;
    std::string reason;
};

template <typename P>
struct CriterionReport {
    Criterion criterion = Criterion::Coherence;
    bool pass = true; // true iff failing_samples is empty
    int n_samples = 0;
    std::optional<double> worst_case;
    // Fixed-point check only: worst residual per direction.
    std::optional<double> worst_forward_residual;  // distance(p, g(f(p)))
    std::optional<double> worst_backward_residual; // distance(e, f(g(e)))
    std::vector<FailingSample<P>> failing_samples;
    std::vector<std::string> notes; // flags that do not affect pass/fail
};

enum class FailureKind {
    Contradiction,
    Incompleteness,
    NonConvergence,
    Overfitting,
    Underfitting,
    Deadlock,
    Healthy,
};

inline const char* to_string(FailureKind k) {
    switch (k) {
        case FailureKind::Contradiction: return "contradiction";
        case FailureKind::Incompleteness: return "incompleteness";
        case FailureKind::NonConvergence: return "non_convergence";
        case FailureKind::Overfitting: return "overfitting";
        case FailureKind::Underfitting: return "underfitting";
        case FailureKind::Deadlock: return "deadlock";
        default: return "healthy";
    }
}

// Labels are not mutually exclusive; a sample may carry several. Healthy
// carries no witness.
struct FailureLabel {
    FailureKind kind = FailureKind::Healthy;
    std::string evidence;
    std::optional<double> witness;
};

template <typename P>
struct SampleDiagnosis {
    P phenomenon;
    std::vector<FailureLabel> labels;

    bool has(FailureKind kind) const {
        for (const auto& l : labels)
            if (l.kind == kind) return true;
        return false;
    }
};

struct FailureClassifierConfig {
    ToleranceConfig tol;
    double deadlock_constancy_fraction = 1.0; // in (0, 1]
    double deadlock_probe_radius = 1.0;       // > 0
    int deadlock_probes = 8;
    double overfit_gap_threshold = 0.5;
    double underfit_floor = 0.5;

    void validate() const {
        tol.validate();
        if (deadlock_constancy_fraction <= 0 || deadlock_constancy_fraction > 1)
            throw ConfigError("deadlock_constancy_fraction must be in (0, 1]");
        if (deadlock_probe_radius <= 0)
            throw ConfigError("deadlock_probe_radius must be positive");
        if (deadlock_probes < 1)
            throw ConfigError("deadlock_probes must be positive");
        if (overfit_gap_threshold <= 0)
            throw ConfigError("overfit_gap_threshold must be positive");
        if (underfit_floor <= 0)
            throw ConfigError("underfit_floor must be positive");
    }
};

template <typename P>
struct Scorecard {
    bool coherent = false;
    bool sound = false;
    bool complete = false;
    CriterionReport<P> coherence_report;
    CriterionReport<P> soundness_report;
    CriterionReport<P> completeness_report;
    std::vector<SampleDiagnosis<P>> per_sample;

    int combination() const {
        return (coherent ? 4 : 0) | (sound ? 2 : 0) | (complete ? 1 : 0);
    }
    std::string combination_label() const {
        std::string s = "(";
        s += coherent ? 'T' : 'F';
        s += ',';
        s += sound ? 'T' : 'F';
        s += ',';
        s += complete ? 'T' : 'F';
        s += ')';
        return s;
    }
};

namespace detail {

template <typename P>
std::vector<P> draw_samples(const PhenomenonSpace<P>& space, std::uint64_t seed,
                            int n) {
    if (n < 1) throw ConfigError("sample count must be >= 1");
    if (space.enumerate) {
        std::vector<P> all = space.enumerate();
        if (all.size() < 10000) return all;
    }
    return space.sample(seed, n);
}

inline std::string format_delta(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace detail

// Coherence: g(f(p)) must land within coherence_tol of p. Undefined round
// trips fail the sample; inadmissible reconstructions are flagged in the
// notes without affecting the verdict.
template <typename P, typename E>
CriterionReport<P> check_coherence(const ReasoningSystem<P, E>& system,
                                   std::uint64_t seed, int n,
                                   const ToleranceConfig& tol) {
    tol.validate();
    const std::vector<P> samples = detail::draw_samples(system.phenomena, seed, n);
    CriterionReport<P> report;
    report.criterion = Criterion::Coherence;
    report.n_samples = static_cast<int>(samples.size());

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto record = roundtrip_discrepancy(system, samples[i]);
        if (!record.delta) {
            report.failing_samples.push_back(
                {samples[i], "roundtrip undefined (" + record.undefined_reason + ")"});
            continue;
        }
        if (record.roundtrip && system.phenomena.admissible &&
            !system.phenomena.admissible(*record.roundtrip)) {
            report.notes.push_back("sample " + std::to_string(i) +
                                   ": generate output inadmissible");
        }
        if (!report.worst_case || *record.delta > *report.worst_case)
            report.worst_case = *record.delta;
        if (!(*record.delta <= tol.coherence_tol) || std::isnan(*record.delta)) {
            report.failing_samples.push_back(
                {samples[i],
                 "delta " + detail::format_delta(*record.delta) + " exceeds tol " +
                     detail::format_delta(tol.coherence_tol)});
        }
    }
    report.pass = report.failing_samples.empty();
    return report;
}

// Soundness: every defined explanation must satisfy the Hard principles.
// Undefined f(p) is skipped here; completeness owns that defect.
template <typename P, typename E>
CriterionReport<P> check_soundness(const ReasoningSystem<P, E>& system,
                                   std::uint64_t seed, int n) {
    const std::vector<P> samples = detail::draw_samples(system.phenomena, seed, n);
    CriterionReport<P> report;
    report.criterion = Criterion::Soundness;
    report.n_samples = static_cast<int>(samples.size());

    for (const auto& p : samples) {
        Partial<E> e = infer(system, p);
        if (!e) continue;
        const PrincipleReport verdicts = satisfies(system.principles, *e, &p);
        if (verdicts.overall_sound) continue;
        std::string reason = "hard principle violation:";
        for (const auto& id : verdicts.hard_violations()) reason += " " + id;
        report.failing_samples.push_back({p, reason});
        report.worst_case =
            std::max(report.worst_case.value_or(0.0),
                     static_cast<double>(verdicts.hard_violations().size()));
    }
    report.pass = report.failing_samples.empty();
    return report;
}

// Completeness: every admissible phenomenon needs a defined explanation that
// satisfies the Hard principles. Systems may declare an explains_fully hook
// that additionally requires the explanation to cover the instantiation's
// oracle-defined targets; a computable but short-falling explanation is still
// an incompleteness, not an unsoundness.
template <typename P, typename E>
CriterionReport<P> check_completeness(const ReasoningSystem<P, E>& system,
                                      std::uint64_t seed, int n) {
    const std::vector<P> samples = detail::draw_samples(system.phenomena, seed, n);
    CriterionReport<P> report;
    report.criterion = Criterion::Completeness;
    report.n_samples = static_cast<int>(samples.size());

    for (const auto& p : samples) {
        Partial<E> e = infer(system, p);
        if (!e) {
            report.failing_samples.push_back(
                {p, "f(p) undefined" + (e.reason().empty() ? "" : ": " + e.reason())});
            continue;
        }
        const PrincipleReport verdicts = satisfies(system.principles, *e, &p);
        if (!verdicts.overall_sound) {
            std::string reason = "explanation violates hard principles:";
            for (const auto& id : verdicts.hard_violations()) reason += " " + id;
            report.failing_samples.push_back({p, reason});
            continue;
        }
        if (system.explains_fully) {
            if (auto missing = system.explains_fully(p, *e)) {
                report.failing_samples.push_back({p, "explanation incomplete: " + *missing});
            }
        }
    }
    report.pass = report.failing_samples.empty();
    return report;
}

// Fixed-point idealization: distance(p, g(f(p))) and distance(e, f(g(e)))
// with e = f(p), both within fixedpoint_tol where the maps are defined.
template <typename P, typename E>
CriterionReport<P> check_fixed_point(const ReasoningSystem<P, E>& system,
                                     std::uint64_t seed, int n,
                                     const ToleranceConfig& tol) {
    tol.validate();
    const std::vector<P> samples = detail::draw_samples(system.phenomena, seed, n);
    CriterionReport<P> report;
    report.criterion = Criterion::FixedPoint;
    report.n_samples = static_cast<int>(samples.size());

    for (const auto& p : samples) {
        Partial<E> e = infer(system, p);
        if (!e) continue;

        Partial<P> back = system.generate_map(*e);
        if (back) {
            const double forward = system.phenomena.distance(p, *back);
            if (!report.worst_forward_residual || forward > *report.worst_forward_residual)
                report.worst_forward_residual = forward;
            if (!(forward <= tol.fixedpoint_tol))
                report.failing_samples.push_back(
                    {p, "p-direction residual " + detail::format_delta(forward)});

            Partial<E> again = system.infer_map(*back);
            if (again) {
                const double backward = system.explanations.distance(*e, *again);
                if (!report.worst_backward_residual ||
                    backward > *report.worst_backward_residual)
                    report.worst_backward_residual = backward;
                if (!(backward <= tol.fixedpoint_tol))
                    report.failing_samples.push_back(
                        {p, "e-direction residual " + detail::format_delta(backward)});
            }
        }
    }
    report.worst_case = std::max(report.worst_forward_residual.value_or(0.0),
                                 report.worst_backward_residual.value_or(0.0));
    if (!report.worst_forward_residual && !report.worst_backward_residual)
        report.worst_case = std::nullopt;
    report.pass = report.failing_samples.empty();
    return report;
}

namespace detail {

// f is "locally constant" at p when at least constancy_fraction of the probe
// phenomena within probe_radius map to explanations indistinguishable from
// f(p) under convergence_tol.
template <typename P, typename E>
std::optional<double> local_constancy(const ReasoningSystem<P, E>& system,
                                      const P& p, const E& at,
                                      const FailureClassifierConfig& cfg,
                                      std::uint64_t probe_seed) {
    if (!system.phenomena.perturb) return std::nullopt;
    Rng rng(probe_seed);
    int defined = 0;
    int constant = 0;
    for (int j = 0; j < cfg.deadlock_probes; ++j) {
        P q = system.phenomena.perturb(p, cfg.deadlock_probe_radius, rng);
        if (system.phenomena.admissible && !system.phenomena.admissible(q)) continue;
        Partial<E> out = system.infer_map(q);
        if (!out) continue;
        ++defined;
        if (system.explanations.distance(at, *out) < cfg.tol.convergence_tol)
            ++constant;
    }
    if (defined == 0) return std::nullopt;
    return static_cast<double>(constant) / defined;
}

} // namespace detail

// Per-sample failure labels from the failure typology. Labels are cumulative:
// a sample can be simultaneously contradictory and deadlocked. Over- and
// underfitting are population-level conditions evaluated only for adaptive
// systems that have recorded a calibration set; when triggered they are
// attached to every sample with the measured gap as witness.
template <typename P, typename E>
std::vector<SampleDiagnosis<P>> classify_failures(const ReasoningSystem<P, E>& system,
                                                  std::uint64_t seed, int n,
                                                  const FailureClassifierConfig& cfg) {
    cfg.validate();
    const std::vector<P> samples = detail::draw_samples(system.phenomena, seed, n);

    // Population-level fitting gap, when measurable.
    std::optional<FailureLabel> overfit_label;
    std::optional<FailureLabel> underfit_label;
    if (system.adapter && !system.adapter->calibration.empty()) {
        const double calib = detail::mean_defined_delta(system, system.adapter->calibration);
        const double held = detail::mean_defined_delta(system, samples);
        if (std::isfinite(calib) && std::isfinite(held) &&
            held - calib > cfg.overfit_gap_threshold) {
            overfit_label = FailureLabel{
                FailureKind::Overfitting,
                "held-out mean delta " + detail::format_delta(held) +
                    " exceeds calibration mean delta " + detail::format_delta(calib) +
                    " by more than " + detail::format_delta(cfg.overfit_gap_threshold),
                held - calib};
        }
        if (std::isfinite(calib) && calib > cfg.underfit_floor) {
            underfit_label = FailureLabel{
                FailureKind::Underfitting,
                "calibration mean delta " + detail::format_delta(calib) +
                    " exceeds floor " + detail::format_delta(cfg.underfit_floor),
                calib};
        }
    }

    std::vector<SampleDiagnosis<P>> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const P& p = samples[i];
        SampleDiagnosis<P> diag{p, {}};

        Partial<E> e = infer(system, p);
        if (!e) {
            if (e.kind() == UndefinedKind::NonFinite) {
                diag.labels.push_back({FailureKind::NonConvergence,
                                       "inference diverged: " + e.reason(),
                                       std::nullopt});
            } else {
                diag.labels.push_back({FailureKind::Incompleteness,
                                       "f(p) undefined" +
                                           (e.reason().empty() ? std::string()
                                                               : ": " + e.reason()),
                                       std::nullopt});
            }
        } else {
            const PrincipleReport verdicts = satisfies(system.principles, *e, &p);
            if (!verdicts.overall_sound) {
                std::string evidence = "hard principle violation:";
                for (const auto& id : verdicts.hard_violations()) evidence += " " + id;
                diag.labels.push_back({FailureKind::Contradiction, evidence,
                                       static_cast<double>(
                                           verdicts.hard_violations().size())});
            }

            const auto traj = iterate_refinement(system, *e, cfg.tol);
            if (traj.diverged() || traj.cycled()) {
                diag.labels.push_back({FailureKind::NonConvergence,
                                       "refinement chain outcome: " + traj.outcome_name(),
                                       traj.deltas.empty()
                                           ? std::optional<double>()
                                           : traj.deltas.back()});
            }

            bool deadlock = false;
            std::string deadlock_evidence;
            if (system.explanations.is_trivial && system.explanations.is_trivial(*e)) {
                deadlock = true;
                deadlock_evidence = "trivial explanation";
            }
            const auto constancy = detail::local_constancy(
                system, p, *e, cfg, derive_seed(seed, 0xD00D + i));
            if (constancy && *constancy >= cfg.deadlock_constancy_fraction) {
                deadlock = true;
                if (!deadlock_evidence.empty()) deadlock_evidence += "; ";
                deadlock_evidence += "locally constant over " +
                                     detail::format_delta(*constancy * 100.0) +
                                     "% of probes";
            }
            if (deadlock)
                diag.labels.push_back(
                    {FailureKind::Deadlock, deadlock_evidence, constancy});
        }

        if (overfit_label) diag.labels.push_back(*overfit_label);
        if (underfit_label) diag.labels.push_back(*underfit_label);
        if (diag.labels.empty())
            diag.labels.push_back({FailureKind::Healthy, "", std::nullopt});
        out.push_back(std::move(diag));
    }
    return out;
}

// Runs the three criteria plus the classifier on the same sample set and
// merges them; the booleans match the individual reports exactly.
template <typename P, typename E>
Scorecard<P> joint_evaluation(const ReasoningSystem<P, E>& system, std::uint64_t seed,
                              int n, const ToleranceConfig& tol,
                              std::optional<FailureClassifierConfig> cfg = std::nullopt) {
    Scorecard<P> card;
    card.coherence_report = check_coherence(system, seed, n, tol);
    card.soundness_report = check_soundness(system, seed, n);
    card.completeness_report = check_completeness(system, seed, n);
    card.coherent = card.coherence_report.pass;
    card.sound = card.soundness_report.pass;
    card.complete = card.completeness_report.pass;

    FailureClassifierConfig classifier = cfg.value_or(FailureClassifierConfig{tol});
    card.per_sample = classify_failures(system, seed, n, classifier);
    return card;
}

} // namespace reasonlab
