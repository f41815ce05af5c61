#pragma once

// placeholder while the subcommands land
namespace htlab::cli {
inline int run_main(int, char**) { return 2; }
}  // namespace htlab::cli
