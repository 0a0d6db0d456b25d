#pragma once

#include "magsob/config.hpp"

#include <string>
#include <vector>

namespace magsob::runner {

inline constexpr const char* kVersion = "magsob 0.1.0";

struct RunOutcome {
    int exit_code = 0; // 0 success, 1 numerical failure, 2 config failure
    std::vector<std::string> artifacts; // files written, relative to out_dir
    std::string message;
};

/// Execute a validated configuration: runs the named scenario and writes its
/// CSV/JSON artifacts under config.out_dir. Identical configs and seeds
/// produce byte-identical outputs.
RunOutcome run(const config::RunConfig& config);

/// 17-significant-digit decimal rendering used by every CSV/JSON writer.
std::string format_g17(double v);

} // namespace magsob::runner
