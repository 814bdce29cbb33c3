#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace temponet {

// Lookup of a vertex id that the graph does not contain.
class not_found_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Malformed line in a text edge stream. Line numbers are 1-based.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// A probability weight vector with no positive mass.
class degenerate_distribution_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Rank-deficient least-squares system.
class ill_conditioned_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An ingested graph that did not pass the configured selection thresholds.
class rejected_graph_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace temponet
