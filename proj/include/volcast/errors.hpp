#pragma once

#include <stdexcept>

namespace volcast {

// Bad or inconsistent input data (files, columns, values). The CLI maps
// this to its data-error exit code.
struct DataError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

// Non-finite or out-of-domain values produced during computation. The CLI
// maps this to its numerical-failure exit code.
struct NumericalError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

}  // namespace volcast
