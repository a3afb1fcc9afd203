#pragma once

// The deductive-logic reasoning system: premises in, bounded forward-chaining
// deduction out, premise reconstruction back via support sets. The principle
// system carries a consistency principle backed by the truth-table oracle;
// optional target formulas express what a complete deduction must reach.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reasonlab/core.hpp"
#include "reasonlab/logic/deduction.hpp"
#include "reasonlab/logic/formula.hpp"
#include "reasonlab/logic/oracle.hpp"

namespace reasonlab::logic {

struct LogicSystemConfig {
    int depth_bound = 6;
    // When set, sampling returns copies of this premise set; otherwise random
    // sets are generated from the pool below.
    std::optional<PremiseSet> fixed_premises;
    int atom_pool = 3;       // atoms A, B, C, ...
    int max_premises = 5;
    int max_formula_depth = 2;
    // Entailed targets a complete explanation must contain.
    std::vector<Formula> targets;
};

// Random formula over the first `atom_pool` uppercase atoms.
inline Formula random_formula(Rng& rng, int atom_pool, int depth) {
    if (depth <= 0 || rng.uniform() < 0.35) {
        std::string name(1, static_cast<char>('A' + rng.below(atom_pool)));
        return Formula::atom(std::move(name));
    }
    switch (rng.below(4)) {
        case 0: return Formula::negation(random_formula(rng, atom_pool, depth - 1));
        case 1:
            return Formula::conjunction(random_formula(rng, atom_pool, depth - 1),
                                        random_formula(rng, atom_pool, depth - 1));
        case 2:
            return Formula::disjunction(random_formula(rng, atom_pool, depth - 1),
                                        random_formula(rng, atom_pool, depth - 1));
        default:
            return Formula::implication(random_formula(rng, atom_pool, depth - 1),
                                        random_formula(rng, atom_pool, depth - 1));
    }
}

inline PremiseSet random_premise_set(Rng& rng, const LogicSystemConfig& cfg) {
    const int count = 1 + static_cast<int>(rng.below(cfg.max_premises));
    std::vector<Formula> formulas;
    formulas.reserve(count);
    for (int i = 0; i < count; ++i)
        formulas.push_back(random_formula(rng, cfg.atom_pool, cfg.max_formula_depth));
    return PremiseSet(std::move(formulas));
}

using LogicSystem = ReasoningSystem<PremiseSet, Deduction>;

inline LogicSystem make_logic_system(LogicSystemConfig cfg = {}) {
    LogicSystem system;
    system.id = "logic";
    system.stateful = false;

    system.phenomena.id = "logic.premises";
    system.phenomena.admissible = [](const PremiseSet& p) {
        return p.atoms().size() <= 16;
    };
    system.phenomena.distance = [](const PremiseSet& a, const PremiseSet& b) {
        return symmetric_difference(a, b);
    };
    system.phenomena.sample = [cfg](std::uint64_t seed, int n) {
        std::vector<PremiseSet> out;
        out.reserve(n);
        if (cfg.fixed_premises) {
            for (int i = 0; i < n; ++i) out.push_back(*cfg.fixed_premises);
            return out;
        }
        Rng rng(seed);
        for (int i = 0; i < n; ++i) out.push_back(random_premise_set(rng, cfg));
        return out;
    };
    // Probe = drop up to floor(radius) random premises; stays within the
    // symmetric-difference ball.
    system.phenomena.perturb = [](const PremiseSet& p, double radius, Rng& rng) {
        PremiseSet out = p;
        int drops = static_cast<int>(radius);
        while (drops-- > 0 && !out.formulas.empty()) {
            const std::size_t victim = rng.below(out.formulas.size());
            out.formulas.erase(out.formulas.begin() +
                               static_cast<std::ptrdiff_t>(victim));
        }
        return out;
    };

    system.explanations.id = "logic.theorems";
    system.explanations.distance = [](const Deduction& a, const Deduction& b) {
        return theorem_set_distance(a, b);
    };
    system.explanations.is_trivial = [](const Deduction& e) {
        return e.theorems.empty();
    };

    const int depth_bound = cfg.depth_bound;
    system.infer_map = [depth_bound](const PremiseSet& p) -> Partial<Deduction> {
        return deduce(p, depth_bound);
    };
    system.generate_map = [](const Deduction& e) -> Partial<PremiseSet> {
        PremiseSet original(e.premises);
        return reconstruct_premises(e.theorems, original);
    };

    system.principles = PrincipleSystem<PremiseSet, Deduction>({
        Principle<PremiseSet, Deduction>::on_pair(
            "consistency", Severity::Hard,
            [](const Deduction&, const PremiseSet& p) {
                return satisfiable(p.formulas) ? Verdict::Satisfied : Verdict::Violated;
            }),
    });

    if (!cfg.targets.empty()) {
        system.explains_fully =
            [targets = cfg.targets](const PremiseSet& p,
                                    const Deduction& e) -> std::optional<std::string> {
            for (const auto& target : targets) {
                if (entails_bruteforce(p.formulas, target) && !e.contains(target))
                    return "entailed target not derived: " + target.to_string();
            }
            return std::nullopt;
        };
    }
    return system;
}

} // namespace reasonlab::logic
