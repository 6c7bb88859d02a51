#pragma once

namespace ffgrad {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the ffgrad command-line tool. Returns 0 on success, 1 on a
/// usage error and 2 when the computation itself fails.
int cli_main(int argc, char** argv);

}  // namespace ffgrad
