#pragma once

// The reasoning-system quintuple: a phenomenon space, an explanation space,
// two partial maps between them (infer and generate), and a principle system
// that explanations are checked against. Everything in diagnostics.hpp and
// dynamics.hpp is generic over one of these bundles.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "reasonlab/errors.hpp"
#include "reasonlab/partial.hpp"
#include "reasonlab/rng.hpp"

namespace reasonlab {

// Thresholds for every approximate comparison the framework makes. Exact
// equality is tolerance 0.
struct ToleranceConfig {
    double coherence_tol = 1e-9;
    double fixedpoint_tol = 1e-9;
    double convergence_tol = 1e-9;
    double divergence_bound = 1e9;
    int max_iterations = 1000;

    void validate() const {
        if (coherence_tol < 0 || fixedpoint_tol < 0 || convergence_tol < 0)
            throw ConfigError("tolerances must be non-negative");
        if (divergence_bound <= convergence_tol)
            throw ConfigError("divergence_bound must exceed convergence_tol");
        if (max_iterations < 1)
            throw ConfigError("max_iterations must be positive");
    }
};

enum class Verdict { Satisfied, Violated, Inapplicable };
enum class Severity { Hard, Soft };
enum class PrincipleScope { ExplanationOnly, Pair };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        default: return "inapplicable";
    }
}

// One checkable constraint. Explanation-scoped principles see only the
// explanation; pair-scoped ones also see the phenomenon that produced it
// (KKT-style checks are inherently pair-relative).
template <typename P, typename E>
class Principle {
public:
    using ExplanationCheck = std::function<Verdict(const E&)>;
    using PairCheck = std::function<Verdict(const E&, const P&)>;

    static Principle on_explanation(std::string id, Severity severity,
                                    ExplanationCheck fn, double soft_penalty = 1.0) {
        Principle p;
        p.id_ = std::move(id);
        p.scope_ = PrincipleScope::ExplanationOnly;
        p.severity_ = severity;
        p.soft_penalty_ = soft_penalty;
        p.explanation_check_ = std::move(fn);
        return p;
    }

    static Principle on_pair(std::string id, Severity severity, PairCheck fn,
                             double soft_penalty = 1.0) {
        Principle p;
        p.id_ = std::move(id);
        p.scope_ = PrincipleScope::Pair;
        p.severity_ = severity;
        p.soft_penalty_ = soft_penalty;
        p.pair_check_ = std::move(fn);
        return p;
    }

    Verdict check(const E& e, const P* p) const {
        if (scope_ == PrincipleScope::ExplanationOnly) return explanation_check_(e);
        if (p == nullptr)
            throw MissingContext("pair-scoped principle '" + id_ +
                                 "' checked without a phenomenon");
        return pair_check_(e, *p);
    }

    const std::string& id() const { return id_; }
    PrincipleScope scope() const { return scope_; }
    Severity severity() const { return severity_; }
    double soft_penalty() const { return soft_penalty_; }

    Principle demoted_to_soft() const {
        Principle p = *this;
        p.severity_ = Severity::Soft;
        return p;
    }

private:
    Principle() = default;

    std::string id_;
    PrincipleScope scope_ = PrincipleScope::ExplanationOnly;
    Severity severity_ = Severity::Hard;
    double soft_penalty_ = 1.0;
    ExplanationCheck explanation_check_;
    PairCheck pair_check_;
};

// Ordered collection of principles with a drift generation index. The version
// can only grow through evolved(), which is how evolve_principles() builds
// successors; an empty system is valid and vacuously satisfied.
template <typename P, typename E>
class PrincipleSystem {
public:
    PrincipleSystem() = default;

    explicit PrincipleSystem(std::vector<Principle<P, E>> principles)
        : principles_(std::move(principles)) {
        require_unique_ids();
    }

    const std::vector<Principle<P, E>>& principles() const { return principles_; }
    int version() const { return version_; }
    bool empty() const { return principles_.empty(); }

    bool has_soft_principles() const {
        for (const auto& p : principles_)
            if (p.severity() == Severity::Soft) return true;
        return false;
    }

    const Principle<P, E>* find(const std::string& id) const {
        for (const auto& p : principles_)
            if (p.id() == id) return &p;
        return nullptr;
    }

    // Successor with the version bumped by one; the only way to raise it.
    PrincipleSystem evolved(std::vector<Principle<P, E>> next) const {
        PrincipleSystem out(std::move(next));
        out.version_ = version_ + 1;
        return out;
    }

    // Structural identity (functions are not comparable): ids, scopes,
    // severities, penalties, and version. Used by drift replay checks.
    using Signature = std::vector<std::tuple<std::string, int, int, double>>;
    Signature signature() const {
        Signature sig;
        sig.reserve(principles_.size());
        for (const auto& p : principles_)
            sig.emplace_back(p.id(), static_cast<int>(p.scope()),
                             static_cast<int>(p.severity()), p.soft_penalty());
        return sig;
    }

    friend bool operator==(const PrincipleSystem& a, const PrincipleSystem& b) {
        return a.version_ == b.version_ && a.signature() == b.signature();
    }

private:
    void require_unique_ids() const {
        std::set<std::string> seen;
        for (const auto& p : principles_)
            if (!seen.insert(p.id()).second)
                throw ConfigError("duplicate principle id '" + p.id() + "'");
    }

    std::vector<Principle<P, E>> principles_;
    int version_ = 0;
};

// The set of phenomena the system interprets: admissibility predicate, a
// deterministic seeded sampler, and a metric. perturb and enumerate are
// optional capability hooks; deadlock probing needs the former, exhaustive
// checks on small finite spaces use the latter.
template <typename P>
struct PhenomenonSpace {
    std::string id;
    std::function<bool(const P&)> admissible;
    std::function<std::vector<P>(std::uint64_t, int)> sample;
    std::function<double(const P&, const P&)> distance;
    std::function<P(const P&, double, Rng&)> perturb;  // nullable
    std::function<std::vector<P>()> enumerate;         // nullable
};

// Candidate explanations: a metric plus a triviality predicate marking
// null/tautological outputs (deadlock evidence).
template <typename E>
struct ExplanationSpace {
    std::string id;
    std::function<double(const E&, const E&)> distance;
    std::function<bool(const E&)> is_trivial;
};

// Instantiation-provided update procedure consumed by dynamics::adapt. The
// hook applies one round over a batch, with the soft-penalty term of the
// system's principles scaled by the given weight folded into its objective.
// It must leave the model untouched when it throws NonFiniteUpdate.
template <typename P>
struct Adapter {
    std::function<void(const std::vector<P>&, double)> update_round;
    std::vector<P> calibration; // last calibration set adapt() trained on
};

// The quintuple bundle. infer_map and generate_map are the raw partial maps;
// use the free functions infer()/generate() for the admissibility-checked
// entry points. Copies of a stateful system alias the same underlying model.
template <typename P, typename E>
struct ReasoningSystem {
    using Phenomenon = P;
    using Explanation = E;

    std::string id;
    PhenomenonSpace<P> phenomena;
    ExplanationSpace<E> explanations;
    std::function<Partial<E>(const P&)> infer_map;
    std::function<Partial<P>(const E&)> generate_map;
    PrincipleSystem<P, E> principles;
    bool stateful = false;

    std::shared_ptr<Adapter<P>> adapter; // null for non-adaptive systems

    // Optional completeness-target hook: returns a reason when the explanation
    // does not fully cover what the instantiation's oracle says it should
    // (e.g. an entailed target theorem missing from a bounded deduction).
    std::function<std::optional<std::string>(const P&, const E&)> explains_fully;
};

template <typename P, typename E>
Partial<E> infer(const ReasoningSystem<P, E>& system, const P& p) {
    if (system.phenomena.admissible && !system.phenomena.admissible(p))
        throw InadmissibleInput("phenomenon rejected by space '" +
                                system.phenomena.id + "'");
    return system.infer_map(p);
}

template <typename P, typename E>
Partial<P> generate(const ReasoningSystem<P, E>& system, const E& e) {
    return system.generate_map(e);
}

struct PrincipleVerdict {
    std::string principle_id;
    Verdict verdict = Verdict::Inapplicable;
    Severity severity = Severity::Hard;
    double soft_penalty = 0.0;
};

struct PrincipleReport {
    std::vector<PrincipleVerdict> verdicts;
    bool overall_sound = true;       // no Hard principle violated
    double soft_penalty_total = 0.0; // sum over violated Soft principles

    std::vector<std::string> hard_violations() const {
        std::vector<std::string> ids;
        for (const auto& v : verdicts)
            if (v.verdict == Verdict::Violated && v.severity == Severity::Hard)
                ids.push_back(v.principle_id);
        return ids;
    }

    std::vector<std::string> violations() const {
        std::vector<std::string> ids;
        for (const auto& v : verdicts)
            if (v.verdict == Verdict::Violated) ids.push_back(v.principle_id);
        return ids;
    }
};

// The satisfaction relation: checks e (and optionally the pair (p, e)) against
// every principle. Soft violations accumulate penalty but never flip
// overall_sound; an empty system is vacuously sound.
template <typename P, typename E>
PrincipleReport satisfies(const PrincipleSystem<P, E>& pi, const E& e,
                          const P* p = nullptr) {
    PrincipleReport report;
    report.verdicts.reserve(pi.principles().size());
    for (const auto& principle : pi.principles()) {
        const Verdict verdict = principle.check(e, p);
        report.verdicts.push_back({principle.id(), verdict, principle.severity(),
                                   principle.soft_penalty()});
        if (verdict != Verdict::Violated) continue;
        if (principle.severity() == Severity::Hard)
            report.overall_sound = false;
        else
            report.soft_penalty_total += principle.soft_penalty();
    }
    return report;
}

template <typename P, typename E>
PrincipleReport satisfies(const PrincipleSystem<P, E>& pi, const E& e, const P& p) {
    return satisfies(pi, e, &p);
}

// The round-trip error signal delta = distance(p, g(f(p))); Undefined in
// either map propagates into an undefined delta with the cause preserved.
template <typename P>
struct DiscrepancyRecord {
    P phenomenon;
    std::optional<double> delta;
    std::optional<P> roundtrip;
    UndefinedKind undefined_kind = UndefinedKind::None;
    std::string undefined_reason;
};

template <typename P, typename E>
DiscrepancyRecord<P> roundtrip_discrepancy(const ReasoningSystem<P, E>& system,
                                           const P& p) {
    DiscrepancyRecord<P> record{p, std::nullopt, std::nullopt,
                                UndefinedKind::None, ""};
    Partial<E> e = infer(system, p);
    if (!e) {
        record.undefined_kind = e.kind();
        record.undefined_reason =
            e.reason().empty() ? "infer undefined" : "infer: " + e.reason();
        return record;
    }
    Partial<P> back = system.generate_map(*e);
    if (!back) {
        record.undefined_kind = back.kind();
        record.undefined_reason =
            back.reason().empty() ? "generate undefined" : "generate: " + back.reason();
        return record;
    }
    record.roundtrip = *back;
    record.delta = system.phenomena.distance(p, *back);
    return record;
}

} // namespace reasonlab
