#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "nilab/errors.hpp"

namespace nilab::scenario {

/// Flags shared by every batch run. The seed is echoed into reports so that
/// identical inputs can be byte-compared; documents themselves contain no
/// randomness.
struct RunFlags {
    int nmax = -1;                        // default check depth for verify tasks
    int paranoid = 0;                     // when > 0: re-verify every space to this depth
    std::int64_t budget = Budget::kDefault;
    std::uint64_t seed = 0;
    std::string report = "text";          // "text" or "machine"
    bool timings = false;                 // adds elapsed_ms fields (nondeterministic)
    std::string scenario_dir;             // overrides the built-in scenario location
};

/// Run a parsed document. Returns the process exit code: 0 when every task
/// met its expectation (or passed, when no expectation is given), 1 when some
/// expectation went unmet or an unexpected failure occurred, 2 on input or
/// resource errors.
int run_document(const nlohmann::json& doc, const RunFlags& flags, std::ostream& out);

/// Load a document from a file and run it. Parse failures are reported with
/// the byte position and yield exit code 2.
int run_file(const std::string& path, const RunFlags& flags, std::ostream& out);

/// Run one of the built-in scenario documents by name.
int run_scenario(const std::string& name, const RunFlags& flags, std::ostream& out);

std::vector<std::string> builtin_scenario_names();

} // namespace nilab::scenario
