#ifndef ASL_ERRORS_HPP
#define ASL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace asl {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Syntax errors carry 1-based line/column of the offending token.
struct parse_error : error {
    int line;
    int col;
    parse_error(const std::string& msg, int l, int c)
        : error(msg + " (line " + std::to_string(l) + ", col " + std::to_string(c) + ")"),
          line(l), col(c) {}
};

// Evaluation against a stack that lacks a binding, ill-formed model data.
struct eval_error : error {
    using error::error;
};

// Bad user input that is not a syntax error: missing problem parts,
// malformed generator instances, unsatisfiable preconditions.
struct input_error : error {
    using error::error;
};

// RHS of an entailment/biabduction query is outside the supported
// quantifier fragment and the bounded fallback could not settle it.
struct restriction_error : error {
    using error::error;
};

// External solver process failed to start or broke protocol.
struct backend_error : error {
    using error::error;
};

// Violated internal invariant; indicates a bug, not bad input.
struct internal_error : error {
    using error::error;
};

} // namespace asl

#endif
