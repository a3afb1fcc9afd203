#pragma once

// Tiny analytic instantiations on the real line. The identity system is the
// everything-passes baseline; the offset system (g shifts by a constant) is
// the canonical sound-but-incoherent case. function_system builds arbitrary
// f/g pairs for dynamics experiments (doubling, negation, contraction).

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "reasonlab/core.hpp"

namespace reasonlab::analytic {

inline PhenomenonSpace<double> real_line(std::string id, double lo = -10.0,
                                         double hi = 10.0) {
    PhenomenonSpace<double> space;
    space.id = std::move(id);
    space.admissible = [](const double& x) { return std::isfinite(x); };
    space.sample = [lo, hi](std::uint64_t seed, int n) {
        Rng rng(seed);
        std::vector<double> out;
        out.reserve(n);
        for (int i = 0; i < n; ++i) out.push_back(rng.uniform(lo, hi));
        return out;
    };
    space.distance = [](const double& a, const double& b) { return std::abs(a - b); };
    space.perturb = [](const double& x, double radius, Rng& rng) {
        return x + rng.uniform(-radius, radius);
    };
    return space;
}

inline ExplanationSpace<double> real_codes(std::string id) {
    ExplanationSpace<double> space;
    space.id = std::move(id);
    space.distance = [](const double& a, const double& b) { return std::abs(a - b); };
    space.is_trivial = [](const double&) { return false; };
    return space;
}

// f and g given directly as total real functions.
inline ReasoningSystem<double, double> function_system(
    std::string id, std::function<double(double)> f, std::function<double(double)> g) {
    ReasoningSystem<double, double> system;
    system.id = id;
    system.phenomena = real_line(id + ".P");
    system.explanations = real_codes(id + ".E");
    system.infer_map = [f = std::move(f)](const double& p) -> Partial<double> {
        return f(p);
    };
    system.generate_map = [g = std::move(g)](const double& e) -> Partial<double> {
        return g(e);
    };
    system.stateful = false;
    return system;
}

inline ReasoningSystem<double, double> identity_system() {
    return function_system("identity", [](double x) { return x; },
                           [](double x) { return x; });
}

// g(e) = e + offset; perfectly sound and complete, incoherent past tol < offset.
inline ReasoningSystem<double, double> offset_system(double offset = 1.0) {
    return function_system("offset", [](double x) { return x; },
                           [offset](double x) { return x + offset; });
}

// f(p) = c for every p; the constant-map deadlock witness.
inline ReasoningSystem<double, double> constant_system(double c = 0.0) {
    return function_system("constant", [c](double) { return c; },
                           [](double e) { return e; });
}

} // namespace reasonlab::analytic
