#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace loctime {

// Parses args (program name excluded), runs the requested query, and writes
// one record per line to out. Returns 0 on success, 2 for rejected input,
// 3 for a computational failure or a failed --verify cross-check; the
// diagnostic goes to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace loctime
