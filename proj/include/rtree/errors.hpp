#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtree {

/// A jump structure that violates an invariant.  `path` lists block indices
/// from the top-level list down through nested cluster bodies.
class invalid_element : public std::invalid_argument {
public:
    invalid_element(const std::string& what, std::vector<std::size_t> path = {})
        : std::invalid_argument(what), path_(std::move(path)) {}
    const std::vector<std::size_t>& path() const { return path_; }

private:
    std::vector<std::size_t> path_;
};

/// The comparison of two elements exceeded the unfolding cap.
class undecided_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace rtree
