#pragma once

#include <stdexcept>
#include <string>

namespace partition_lab {

/// A request that is well-formed but exceeds a table or enumeration budget.
class RefusalError : public std::runtime_error
{
  public:
    explicit RefusalError(std::string const& what) : std::runtime_error(what) {}
};

/// An iterative numerical method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error
{
  public:
    explicit ConvergenceError(std::string const& what) : std::runtime_error(what) {}
};

}  // namespace partition_lab
