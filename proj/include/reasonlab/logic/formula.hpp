#pragma once

// Propositional formulas: atoms, negation, conjunction, disjunction,
// implication. Values are immutable shared trees; equality and ordering are
// structural, so formulas can live in std::set and be deduplicated cheaply.

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "reasonlab/errors.hpp"

namespace reasonlab::logic {

class Formula {
public:
    enum class Kind { Atom, Not, And, Or, Implies };

    static Formula atom(std::string name) {
        return Formula(std::make_shared<const Node>(
            Node{Kind::Atom, std::move(name), nullptr, nullptr}));
    }
    static Formula negation(Formula f) {
        return Formula(std::make_shared<const Node>(
            Node{Kind::Not, "", f.node_, nullptr}));
    }
    static Formula conjunction(Formula lhs, Formula rhs) {
        return Formula(std::make_shared<const Node>(
            Node{Kind::And, "", lhs.node_, rhs.node_}));
    }
    static Formula disjunction(Formula lhs, Formula rhs) {
        return Formula(std::make_shared<const Node>(
            Node{Kind::Or, "", lhs.node_, rhs.node_}));
    }
    static Formula implication(Formula lhs, Formula rhs) {
        return Formula(std::make_shared<const Node>(
            Node{Kind::Implies, "", lhs.node_, rhs.node_}));
    }

    Kind kind() const { return node_->kind; }
    const std::string& atom_name() const { return node_->name; }
    Formula left() const { return Formula(node_->lhs); }
    Formula right() const { return Formula(node_->rhs); }

    friend bool operator==(const Formula& a, const Formula& b) {
        return compare(a.node_.get(), b.node_.get()) == 0;
    }
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
    friend bool operator<(const Formula& a, const Formula& b) {
        return compare(a.node_.get(), b.node_.get()) < 0;
    }

    void collect_atoms(std::set<std::string>& out) const { collect(node_.get(), out); }

    std::set<std::string> atoms() const {
        std::set<std::string> out;
        collect_atoms(out);
        return out;
    }

    // Every subformula including the formula itself.
    void collect_subformulas(std::vector<Formula>& out) const {
        out.push_back(*this);
        if (node_->lhs) Formula(node_->lhs).collect_subformulas(out);
        if (node_->rhs) Formula(node_->rhs).collect_subformulas(out);
    }

    // Renders with minimal parentheses: ! binds tightest, then &, |, and
    // right-associative ->.
    std::string to_string() const { return print(node_.get(), 0); }

private:
    struct Node {
        Kind kind;
        std::string name;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static int precedence(Kind k) {
        switch (k) {
            case Kind::Implies: return 1;
            case Kind::Or: return 2;
            case Kind::And: return 3;
            case Kind::Not: return 4;
            default: return 5;
        }
    }

    static int compare(const Node* a, const Node* b) {
        if (a == b) return 0;
        if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
        if (a->kind == Kind::Atom) return a->name.compare(b->name);
        if (int c = compare(a->lhs.get(), b->lhs.get()); c != 0) return c;
        if (a->rhs == nullptr) return b->rhs == nullptr ? 0 : -1;
        if (b->rhs == nullptr) return 1;
        return compare(a->rhs.get(), b->rhs.get());
    }

    static void collect(const Node* n, std::set<std::string>& out) {
        if (n->kind == Kind::Atom) {
            out.insert(n->name);
            return;
        }
        if (n->lhs) collect(n->lhs.get(), out);
        if (n->rhs) collect(n->rhs.get(), out);
    }

    static std::string print(const Node* n, int parent_prec) {
        std::string body;
        const int prec = precedence(n->kind);
        switch (n->kind) {
            case Kind::Atom:
                body = n->name;
                break;
            case Kind::Not:
                body = "!" + print(n->lhs.get(), prec);
                break;
            case Kind::And:
                body = print(n->lhs.get(), prec) + " & " + print(n->rhs.get(), prec + 1);
                break;
            case Kind::Or:
                body = print(n->lhs.get(), prec) + " | " + print(n->rhs.get(), prec + 1);
                break;
            case Kind::Implies:
                // Right-associative: the left side needs parens at equal level.
                body = print(n->lhs.get(), prec + 1) + " -> " + print(n->rhs.get(), prec);
                break;
        }
        if (prec < parent_prec) return "(" + body + ")";
        return body;
    }

    std::shared_ptr<const Node> node_;
};

} // namespace reasonlab::logic
