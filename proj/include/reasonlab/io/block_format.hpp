#pragma once

// Plain-text matrix blocks: each block is a header line `name rows cols`
// followed by rows*cols whitespace-separated numbers in row-major order.
// `inf` / `-inf` are accepted. Lines starting with '#' are comments. QP
// problem files and autoencoder weight snapshots share this format.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "reasonlab/errors.hpp"
#include "reasonlab/opt/qp.hpp"

namespace reasonlab::io {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double parse_number(const std::string& token) {
    if (token == "inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) throw ConfigError("");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("malformed number '" + token + "'");
    }
}

inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

inline std::map<std::string, MatrixXd> read_blocks(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, MatrixXd> blocks;
    std::string pending;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        int rows = 0, cols = 0;
        if (!(ls >> rows >> cols) || rows < 0 || cols < 0)
            throw ConfigError("block header must be 'name rows cols', got: " + line);
        if (blocks.count(name)) throw ConfigError("duplicate block '" + name + "'");

        MatrixXd m(rows, cols);
        std::string token;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                while (!(ls >> token)) {
                    if (!std::getline(in, line))
                        throw ConfigError("block '" + name + "' is truncated");
                    if (auto h = line.find('#'); h != std::string::npos)
                        line = line.substr(0, h);
                    ls = std::istringstream(line);
                }
                m(r, c) = parse_number(token);
            }
        }
        blocks.emplace(name, std::move(m));
    }
    return blocks;
}

inline void write_block(std::ostream& out, const std::string& name,
                        const MatrixXd& m) {
    out << name << " " << m.rows() << " " << m.cols() << "\n";
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c)
            out << (c ? " " : "") << format_number(m(r, c));
        out << "\n";
    }
}

// QP problem files use blocks Q (n x n), c (n x 1), optional box (n x 2 as
// lo hi per row), optional halfspaces (m x (n+1) as normal..., offset).
inline opt::QpProblem parse_qp_problem(const std::string& text) {
    auto blocks = read_blocks(text);
    if (!blocks.count("Q") || !blocks.count("c"))
        throw ConfigError("problem file needs Q and c blocks");

    opt::QpProblem problem;
    problem.Q = blocks.at("Q");
    const MatrixXd& c = blocks.at("c");
    if (c.cols() != 1) throw ConfigError("c block must have one column");
    problem.c = c.col(0);

    if (blocks.count("box")) {
        const MatrixXd& b = blocks.at("box");
        if (b.cols() != 2) throw ConfigError("box block must be n x 2 (lo hi)");
        problem.box = opt::Box{b.col(0), b.col(1)};
    }
    if (blocks.count("halfspaces")) {
        const MatrixXd& h = blocks.at("halfspaces");
        if (h.cols() != problem.c.size() + 1)
            throw ConfigError("halfspace rows must be (normal..., offset)");
        for (int r = 0; r < h.rows(); ++r)
            problem.halfspaces.push_back(
                {h.row(r).head(h.cols() - 1).transpose(), h(r, h.cols() - 1)});
    }
    problem.validate();
    return problem;
}

inline std::string format_qp_problem(const opt::QpProblem& problem) {
    std::ostringstream out;
    write_block(out, "Q", problem.Q);
    write_block(out, "c", problem.c);
    if (problem.box) {
        MatrixXd b(problem.c.size(), 2);
        b.col(0) = problem.box->lo;
        b.col(1) = problem.box->hi;
        write_block(out, "box", b);
    }
    if (!problem.halfspaces.empty()) {
        MatrixXd h(static_cast<int>(problem.halfspaces.size()), problem.c.size() + 1);
        for (std::size_t i = 0; i < problem.halfspaces.size(); ++i) {
            h.row(static_cast<int>(i)).head(problem.c.size()) =
                problem.halfspaces[i].normal.transpose();
            h(static_cast<int>(i), problem.c.size()) = problem.halfspaces[i].offset;
        }
        write_block(out, "halfspaces", h);
    }
    return out.str();
}

} // namespace reasonlab::io
