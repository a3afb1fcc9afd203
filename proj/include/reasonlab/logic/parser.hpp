#pragma once

// Recursive-descent parser for the ASCII formula grammar:
//
//   implication := disjunction ('->' implication)?
//   disjunction := conjunction ('|' conjunction)*
//   conjunction := negation ('&' negation)*
//   negation    := '!' negation | primary
//   primary     := atom | '(' implication ')'
//
// Atoms are [A-Za-z][A-Za-z0-9_]*; whitespace is insignificant. Errors carry
// the byte offset and the expected-token set.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "reasonlab/errors.hpp"
#include "reasonlab/logic/formula.hpp"

namespace reasonlab::logic {

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Formula parse() {
        Formula f = implication();
        skip_ws();
        if (pos_ != text_.size()) fail("end of input");
        return f;
    }

private:
    Formula implication() {
        Formula lhs = disjunction();
        skip_ws();
        if (match("->")) return Formula::implication(lhs, implication());
        return lhs;
    }

    Formula disjunction() {
        Formula f = conjunction();
        skip_ws();
        while (match("|")) {
            f = Formula::disjunction(f, conjunction());
            skip_ws();
        }
        return f;
    }

    Formula conjunction() {
        Formula f = negation();
        skip_ws();
        while (match("&")) {
            f = Formula::conjunction(f, negation());
            skip_ws();
        }
        return f;
    }

    Formula negation() {
        skip_ws();
        if (match("!")) return Formula::negation(negation());
        return primary();
    }

    Formula primary() {
        skip_ws();
        if (match("(")) {
            Formula inner = implication();
            skip_ws();
            if (!match(")")) fail("')'");
            return inner;
        }
        if (pos_ < text_.size() && is_atom_start(text_[pos_])) {
            const std::size_t start = pos_;
            ++pos_;
            while (pos_ < text_.size() && is_atom_char(text_[pos_])) ++pos_;
            return Formula::atom(std::string(text_.substr(start, pos_ - start)));
        }
        fail("atom, '!' or '('");
    }

    static bool is_atom_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c));
    }
    static bool is_atom_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool match(std::string_view token) {
        skip_ws();
        if (text_.substr(pos_, token.size()) != token) return false;
        pos_ += token.size();
        return true;
    }

    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError("parse error at offset " + std::to_string(pos_) +
                             ": expected " + expected,
                         pos_, expected);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Formula parse_formula(std::string_view text) {
    return detail::Parser(text).parse();
}

// One formula per line; '#' starts a comment, blank lines are skipped.
inline std::vector<Formula> parse_formula_lines(std::string_view text) {
    std::vector<Formula> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (!blank) out.push_back(parse_formula(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

} // namespace reasonlab::logic
