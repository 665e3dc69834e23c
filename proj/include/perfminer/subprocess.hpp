#pragma once

#include <string>
#include <vector>

namespace perfminer {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    bool ok() const { return exit_code == 0; }
};

// Runs argv[0] with the given arguments (no shell), capturing stdout and
// stderr. Throws IoError when the process cannot be spawned.
CommandResult run_command(const std::vector<std::string>& argv, const std::string& cwd = "");

} // namespace perfminer
