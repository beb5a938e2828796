#pragma once

#include <stdexcept>
#include <string>

namespace cmc {

enum class ErrorKind {
    domain,           // argument or query point outside the admissible set
    boundary_stencil, // grid query too close to the grid boundary
    capability,       // operation not available for this input representation
    degenerate,       // immersion not regular (lambda <= tol)
    not_conformal,    // conformality residual above tolerance
    hypothesis,       // a theorem hypothesis required by the operation fails
    unsupported_curve,
    divergence,       // non-finite iterate in a nonlinear solve
    linear_solve,
    search,           // eigenvalue bracket not found
    solver,           // iteration did not converge
    no_instability,
    parse,
    io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::boundary_stencil: return "boundary-stencil";
        case ErrorKind::capability: return "capability";
        case ErrorKind::degenerate: return "degenerate-immersion";
        case ErrorKind::not_conformal: return "not-conformal";
        case ErrorKind::hypothesis: return "hypothesis";
        case ErrorKind::unsupported_curve: return "unsupported-curve";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::linear_solve: return "linear-solve";
        case ErrorKind::search: return "search";
        case ErrorKind::solver: return "solver";
        case ErrorKind::no_instability: return "no-instability";
        case ErrorKind::parse: return "parse";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Parse failure with a 1-based source location.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int column)
        : Error(ErrorKind::parse, what + " at line " + std::to_string(line) + ", column " +
                                      std::to_string(column)),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Newton divergence; carries the iteration at which the iterate became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int iteration)
        : Error(ErrorKind::divergence, what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

}  // namespace cmc
