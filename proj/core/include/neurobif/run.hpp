#pragma once

// Subcommand driver: config -> analysis -> artifacts + manifest.json.

#include <iosfwd>
#include <string>
#include <vector>

#include "neurobif/config.hpp"

namespace neurobif {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_numerical = 2;

struct RunOutcome {
    int exit_code = exit_ok;
    std::vector<std::string> files;   // artifact names written into cfg.out, manifest last
    std::string error;
    bool partial = false;
};

// Never throws for analysis failures: numerical ones give exit 2 and a
// manifest with "partial": true next to whatever was already written.
RunOutcome run(const RunConfig& cfg, std::ostream& log);

std::string library_version();

}  // namespace neurobif
