#pragma once

#include <string>
#include <string_view>

#include "sagaze/types.hpp"

namespace sagaze {

// Formats with %.9g: 9 significant digits, enough for the documented
// round-trip guarantee while keeping files diffable.
std::string format_double(double value);

// Parses `t_ms,x,y,object` CSV. Accepts LF or CRLF endings and a leading
// UTF-8 BOM; the object field may be empty (background). Raises MalformedRow
// (with the 1-based line number), NonMonotonicTime, or EmptyInput.
GazeTrace parse_gaze_csv(std::string_view bytes, std::string trial_id = "");

// Parses `t_ms,speed_mps` CSV; additionally rejects negative speeds.
TelemetryTrace parse_telemetry_csv(std::string_view bytes, std::string trial_id = "");

std::string write_gaze_csv(const GazeTrace& trace);
std::string write_telemetry_csv(const TelemetryTrace& trace);

} // namespace sagaze
