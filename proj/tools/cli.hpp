#pragma once

#include <iosfwd>

namespace dgoursat {

/// Runs the command line; returns 0 on success, 1 on invalid input, 2 on numerical failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dgoursat
