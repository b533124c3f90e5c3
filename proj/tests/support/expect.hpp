#pragma once

#include <doctest.h>

#include "alexbench/error.hpp"

namespace testing_support {

// Runs f and returns the code of the alexbench::Error it throws.
template <class F>
alexbench::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const alexbench::Error& e) {
    return e.code();
  }
  FAIL("expected an alexbench::Error");
  return alexbench::ErrorCode::IoError;
}

}  // namespace testing_support
