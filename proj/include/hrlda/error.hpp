#pragma once

#include <stdexcept>
#include <string>

namespace hrlda {

/// Bad input data: unreadable files, schema violations, unknown ids.
/// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal count or state bookkeeping went wrong.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hrlda
