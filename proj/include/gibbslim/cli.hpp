#pragma once

// Subcommand front end; kept callable in-process so tests can drive it.

namespace gibbslim::cli {

int run(int argc, const char* const* argv);

}  // namespace gibbslim::cli
