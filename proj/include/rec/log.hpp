#pragma once

#include <functional>
#include <string>

namespace rec {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink; returns the previous one.
/// The default writes "warning: <message>" to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace rec
