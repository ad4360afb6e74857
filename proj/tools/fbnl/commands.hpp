#pragma once

#include "config.hpp"

#include <string>
#include <vector>

namespace fbnl::cli {

struct Invocation {
    std::string command;
    Config cfg;
    std::string out_dir;
    int threads = 1;
};

const std::vector<std::string>& command_names();

// Returns the process exit status; errors propagate as fbnl exceptions.
int run_command(const Invocation& inv);

} // namespace fbnl::cli
