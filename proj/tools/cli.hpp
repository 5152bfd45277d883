#pragma once

namespace masim {

// Entry point shared by the executable and the CLI tests.
// Returns 0 on success, 2 on configuration errors, 1 on runtime errors.
int cli_main(int argc, char** argv);

}  // namespace masim
