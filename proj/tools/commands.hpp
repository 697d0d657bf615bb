#pragma once

namespace cand::cli {

/// Parses arguments, runs the selected command and returns the exit code:
/// 0 ok, 2 I/O or artifact error, 3 validation error.
int run(int argc, char** argv);

}  // namespace cand::cli
