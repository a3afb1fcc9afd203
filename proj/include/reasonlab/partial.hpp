#pragma once

#include <optional>
#include <string>
#include <utility>

namespace reasonlab {

// Why a partial map had no value at some point of its domain. NonFinite is the
// special case where an iterative map blew up (diverging solver, overflowing
// update); diagnostics count it as non-convergence rather than incompleteness.
enum class UndefinedKind {
    None,      // a value is present
    Undefined, // the map is simply not defined here
    NonFinite, // the map diverged / overflowed while being evaluated
};

// Result of a partial map: either a value, or Undefined with a reason.
// Partiality is data, never an exception, so diagnostics can count it.
template <typename T>
class Partial {
public:
    Partial(T value) // NOLINT(google-explicit-constructor)
        : value_(std::move(value)), kind_(UndefinedKind::None) {}

    static Partial defined(T value) { return Partial(std::move(value)); }

    static Partial undefined(std::string reason = "") {
        return Partial(UndefinedKind::Undefined, std::move(reason));
    }

    static Partial non_finite(std::string reason = "") {
        return Partial(UndefinedKind::NonFinite, std::move(reason));
    }

    bool has_value() const { return kind_ == UndefinedKind::None; }
    explicit operator bool() const { return has_value(); }

    const T& value() const { return *value_; }
    T& value() { return *value_; }
    const T& operator*() const { return *value_; }
    const T* operator->() const { return &*value_; }

    UndefinedKind kind() const { return kind_; }
    const std::string& reason() const { return reason_; }

private:
    Partial(UndefinedKind kind, std::string reason)
        : kind_(kind), reason_(std::move(reason)) {}

    std::optional<T> value_;
    UndefinedKind kind_;
    std::string reason_;
};

} // namespace reasonlab
