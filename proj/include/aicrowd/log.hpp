#pragma once

#include <string>

namespace aicrowd {

void log_info(const std::string& msg);
void log_warn(const std::string& msg);

// Suppresses info/warn output (acceptance runs keep their output readable).
void set_log_quiet(bool quiet);

}  // namespace aicrowd
