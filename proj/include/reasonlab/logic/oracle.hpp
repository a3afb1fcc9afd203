#pragma once

// Truth-table oracle: entailment and satisfiability by exhaustive enumeration
// of assignments. Capped at 16 distinct atoms (2^16 rows); everything the
// deduction engine emits is judged against this.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "reasonlab/errors.hpp"
#include "reasonlab/logic/formula.hpp"

namespace reasonlab::logic {

struct PremiseSet;

namespace detail {

inline bool eval(const Formula& f, const std::map<std::string, bool>& assignment) {
    switch (f.kind()) {
        case Formula::Kind::Atom: return assignment.at(f.atom_name());
        case Formula::Kind::Not: return !eval(f.left(), assignment);
        case Formula::Kind::And: return eval(f.left(), assignment) && eval(f.right(), assignment);
        case Formula::Kind::Or: return eval(f.left(), assignment) || eval(f.right(), assignment);
        default: return !eval(f.left(), assignment) || eval(f.right(), assignment);
    }
}

// Invokes fn(assignment) for every assignment over the given atoms; stops
// early when fn returns false.
template <typename Fn>
void for_each_assignment(const std::set<std::string>& atoms, Fn&& fn) {
    if (atoms.size() > 16)
        throw TooManyAtoms("truth-table oracle supports at most 16 atoms, got " +
                           std::to_string(atoms.size()));
    std::vector<std::string> names(atoms.begin(), atoms.end());
    const std::uint32_t rows = 1u << names.size();
    std::map<std::string, bool> assignment;
    for (std::uint32_t mask = 0; mask < rows; ++mask) {
        for (std::size_t i = 0; i < names.size(); ++i)
            assignment[names[i]] = (mask >> i) & 1u;
        if (!fn(assignment)) return;
    }
}

} // namespace detail

// True iff every assignment satisfying all formulas in `premises` also
// satisfies `phi`.
inline bool entails_bruteforce(const std::vector<Formula>& premises, const Formula& phi) {
    std::set<std::string> atoms = phi.atoms();
    for (const auto& p : premises) p.collect_atoms(atoms);

    bool entailed = true;
    detail::for_each_assignment(atoms, [&](const auto& assignment) {
        for (const auto& p : premises)
            if (!detail::eval(p, assignment)) return true; // not a model, keep going
        if (!detail::eval(phi, assignment)) {
            entailed = false;
            return false;
        }
        return true;
    });
    return entailed;
}

inline bool satisfiable(const std::vector<Formula>& premises) {
    std::set<std::string> atoms;
    for (const auto& p : premises) p.collect_atoms(atoms);

    bool found = false;
    detail::for_each_assignment(atoms, [&](const auto& assignment) {
        for (const auto& p : premises)
            if (!detail::eval(p, assignment)) return true;
        found = true;
        return false;
    });
    return found;
}

} // namespace reasonlab::logic
