#include "aicrowd/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace aicrowd {

namespace {
std::atomic<bool> g_quiet{false};
std::mutex g_log_mutex;
}  // namespace

void set_log_quiet(bool quiet) { g_quiet.store(quiet); }

void log_info(const std::string& msg) {
  if (g_quiet.load()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_warn(const std::string& msg) {
  if (g_quiet.load()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

}  // namespace aicrowd
