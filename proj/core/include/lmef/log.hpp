#pragma once

#include <functional>
#include <string_view>

namespace lmef {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the warning sink (stderr by default). Returns the previous sink.
LogSink set_log_sink(LogSink sink);
void log_warning(std::string_view message);

} // namespace lmef
