#pragma once

#include <string>
#include <vector>

namespace sagaze {

struct ManifestEntry {
    std::string trial_id;
    std::string gaze_path;      // resolved against the manifest's directory
    std::string telemetry_path;
};

// Plain text, one trial per line: `trial_id,gaze_path,telemetry_path`.
// Blank lines and lines starting with '#' are skipped. Trial ids must be
// unique. Relative paths are resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::string& path);

// Entry point behind main(). Exit codes: 0 success, 1 I/O or argument
// error, 2 data/precondition error.
int run_cli(const std::vector<std::string>& args);

} // namespace sagaze
