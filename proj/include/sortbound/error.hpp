#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sortbound {

/// Argument outside the supported range (element counts, budgets, indices).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adding a comparison outcome that closes a cycle in the order.
class ContradictionError : public std::logic_error {
public:
    ContradictionError(std::size_t j, std::size_t k)
        : std::logic_error("contradiction: adding u" + std::to_string(j) + " < u" + std::to_string(k) +
                           " violates antisymmetry"),
          first(j),
          second(k) {}

    std::size_t first;
    std::size_t second;
};

/// Malformed poset text; `line` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}

    std::size_t line;
};

/// Damaged or mismatched checkpoint file; `offset` is the byte position where reading failed.
class CheckpointError : public std::runtime_error {
public:
    CheckpointError(std::size_t offset, const std::string& what)
        : std::runtime_error("checkpoint offset " + std::to_string(offset) + ": " + what), offset(offset) {}

    std::size_t offset;
};

}  // namespace sortbound
