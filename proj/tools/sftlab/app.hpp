#pragma once
#include <exception>
#include <ostream>

namespace sftlab {

/// Full command line entry point. Results go to out as JSON, failures to err
/// as a one-line JSON error object. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int exit_code(const std::exception& e);

}  // namespace sftlab
