#pragma once

// Bounded forward chaining over propositional formulas. The working set is
// confined to the subformula closure of the premise set, which keeps every
// round finite and makes the depth bound meaningful: each round applies modus
// ponens, conjunction introduction/elimination, and disjunction introduction,
// where the introduction rules may only build formulas that already occur as
// subformulas of some premise. Every theorem carries the set of premise
// indices its derivation depended on, including the premise that contributed
// the syntactic template of an introduced conjunction/disjunction, so
// reconstructed premise subsets can always replay the derivation.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "reasonlab/errors.hpp"
#include "reasonlab/logic/formula.hpp"
#include "reasonlab/logic/oracle.hpp"

namespace reasonlab::logic {

// Ordered, duplicate-free set of premises. Order matters: theorems refer to
// premises by index.
struct PremiseSet {
    std::vector<Formula> formulas;

    PremiseSet() = default;
    explicit PremiseSet(std::vector<Formula> input) {
        for (auto& f : input) {
            bool seen = false;
            for (const auto& existing : formulas) seen |= existing == f;
            if (!seen) formulas.push_back(std::move(f));
        }
    }

    std::size_t size() const { return formulas.size(); }
    bool contains(const Formula& f) const {
        for (const auto& existing : formulas)
            if (existing == f) return true;
        return false;
    }

    std::set<std::string> atoms() const {
        std::set<std::string> out;
        for (const auto& f : formulas) f.collect_atoms(out);
        return out;
    }

    friend bool operator==(const PremiseSet& a, const PremiseSet& b) {
        if (a.size() != b.size()) return false;
        for (const auto& f : a.formulas)
            if (!b.contains(f)) return false;
        return true;
    }
};

// Size of the symmetric difference; the premise-space metric.
inline double symmetric_difference(const PremiseSet& a, const PremiseSet& b) {
    double count = 0;
    for (const auto& f : a.formulas)
        if (!b.contains(f)) ++count;
    for (const auto& f : b.formulas)
        if (!a.contains(f)) ++count;
    return count;
}

struct TheoremRecord {
    Formula formula;
    std::set<std::size_t> support; // premise indices the derivation used
    int depth = 0;                 // 0 iff the formula is a premise itself
};

// The explanation value of the logic system: the deduced theorems plus the
// premise universe the support indices refer to.
struct Deduction {
    std::vector<TheoremRecord> theorems;
    bool exhausted = false; // depth bound hit before the fixpoint
    std::vector<Formula> premises;

    bool contains(const Formula& f) const {
        for (const auto& t : theorems)
            if (t.formula == f) return true;
        return false;
    }

    std::vector<Formula> formulas() const {
        std::vector<Formula> out;
        out.reserve(theorems.size());
        for (const auto& t : theorems) out.push_back(t.formula);
        return out;
    }
};

// Symmetric difference of the theorem formula sets, supports ignored; the
// explanation-space metric compares logical content only.
inline double theorem_set_distance(const Deduction& a, const Deduction& b) {
    double count = 0;
    for (const auto& t : a.theorems)
        if (!b.contains(t.formula)) ++count;
    for (const auto& t : b.theorems)
        if (!a.contains(t.formula)) ++count;
    return count;
}

namespace detail {

struct WorkingSet {
    std::map<Formula, std::size_t> index;
    std::vector<TheoremRecord> records;

    bool has(const Formula& f) const { return index.count(f) > 0; }

    const TheoremRecord* find(const Formula& f) const {
        auto it = index.find(f);
        return it == index.end() ? nullptr : &records[it->second];
    }

    // Returns true when f was new. Existing entries win (they have minimal
    // depth because rounds are breadth-first).
    bool add(TheoremRecord record) {
        if (has(record.formula)) return false;
        index.emplace(record.formula, records.size());
        records.push_back(std::move(record));
        return true;
    }
};

// Subformula closure with the index of the first premise contributing each
// formula.
inline std::map<Formula, std::size_t> premise_closure(const PremiseSet& premises) {
    std::map<Formula, std::size_t> closure;
    for (std::size_t i = 0; i < premises.formulas.size(); ++i) {
        std::vector<Formula> subs;
        premises.formulas[i].collect_subformulas(subs);
        for (auto& sub : subs) closure.emplace(std::move(sub), i);
    }
    return closure;
}

inline std::set<std::size_t> merged_support(const std::set<std::size_t>& a,
                                            const std::set<std::size_t>& b) {
    std::set<std::size_t> out = a;
    out.insert(b.begin(), b.end());
    return out;
}

// One breadth-first round of rule applications against `current`; results are
// collected without mutating the working set so the round is order-independent.
inline std::vector<TheoremRecord> apply_rules(
    const WorkingSet& current, const std::map<Formula, std::size_t>& closure,
    int depth) {
    std::vector<TheoremRecord> fresh;
    auto propose = [&](Formula f, std::set<std::size_t> support) {
        if (current.has(f)) return;
        for (const auto& r : fresh)
            if (r.formula == f) return;
        fresh.push_back({std::move(f), std::move(support), depth});
    };

    for (const auto& record : current.records) {
        const Formula& f = record.formula;
        // Modus ponens.
        if (f.kind() == Formula::Kind::Implies) {
            if (const TheoremRecord* antecedent = current.find(f.left()))
                propose(f.right(), merged_support(record.support, antecedent->support));
        }
        // Conjunction elimination.
        if (f.kind() == Formula::Kind::And) {
            propose(f.left(), record.support);
            propose(f.right(), record.support);
        }
    }

    // Introduction rules, bounded to the premise closure. The closure source
    // premise joins the support: it supplied the template being introduced.
    for (const auto& [candidate, source] : closure) {
        if (current.has(candidate)) continue;
        if (candidate.kind() == Formula::Kind::And) {
            const TheoremRecord* lhs = current.find(candidate.left());
            const TheoremRecord* rhs = current.find(candidate.right());
            if (lhs && rhs) {
                auto support = merged_support(lhs->support, rhs->support);
                support.insert(source);
                propose(candidate, std::move(support));
            }
        } else if (candidate.kind() == Formula::Kind::Or) {
            const TheoremRecord* lhs = current.find(candidate.left());
            const TheoremRecord* rhs = current.find(candidate.right());
            const TheoremRecord* witness = lhs ? lhs : rhs;
            if (witness) {
                auto support = witness->support;
                support.insert(source);
                propose(candidate, std::move(support));
            }
        }
    }
    return fresh;
}

} // namespace detail

// Forward chaining to fixpoint or depth_bound. The exhausted flag reports
// that the bound cut the chain short (one more round would still add
// something); it is not an error.
inline Deduction deduce(const PremiseSet& premises, int depth_bound) {
    if (depth_bound < 1) throw ConfigError("depth_bound must be >= 1");

    const auto closure = detail::premise_closure(premises);
    detail::WorkingSet working;
    for (std::size_t i = 0; i < premises.formulas.size(); ++i)
        working.add({premises.formulas[i], {i}, 0});

    bool exhausted = false;
    for (int depth = 1; depth <= depth_bound; ++depth) {
        auto fresh = detail::apply_rules(working, closure, depth);
        if (fresh.empty()) break; // fixpoint
        for (auto& record : fresh) working.add(std::move(record));
        if (depth == depth_bound)
            exhausted = !detail::apply_rules(working, closure, depth + 1).empty();
    }

    Deduction out;
    out.theorems = std::move(working.records);
    out.exhausted = exhausted;
    out.premises = premises.formulas;
    return out;
}

// Realizes the generation map: the sub-premise-set indexed by the union of the
// theorems' supports. Re-deducing the result reproduces every input theorem.
inline PremiseSet reconstruct_premises(const std::vector<TheoremRecord>& theorems,
                                       const PremiseSet& original) {
    std::set<std::size_t> used;
    for (const auto& t : theorems)
        for (std::size_t idx : t.support) {
            if (idx >= original.size())
                throw IndexOutOfRange("support index " + std::to_string(idx) +
                                      " outside premise set of size " +
                                      std::to_string(original.size()));
            used.insert(idx);
        }
    std::vector<Formula> selected;
    selected.reserve(used.size());
    for (std::size_t idx : used) selected.push_back(original.formulas[idx]);
    return PremiseSet(std::move(selected));
}

} // namespace reasonlab::logic
