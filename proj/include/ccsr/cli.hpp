#pragma once

namespace ccsr {

// Command-line front end. Exit codes: 0 success or equivalent, 1 not
// equivalent, 2 input error, 3 budget exceeded.
int cli_main(int argc, const char* const* argv);

}  // namespace ccsr
