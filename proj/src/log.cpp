#include "rec/log.hpp"

#include <cstdio>
#include <mutex>
#include <utility>

namespace rec {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& sink() {
  static WarningHandler h = [](const std::string& msg) { std::fprintf(stderr, "warning: %s\n", msg.c_str()); };
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  return std::exchange(sink(), std::move(handler));
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink()) sink()(message);
}

}  // namespace rec
