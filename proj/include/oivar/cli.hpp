#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oivar {

// Subcommands: simulate, estimate, forecast-eval, demo-ordering, summarize.
// Returns 0 on success, 1 on runtime errors and 2 on usage errors.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oivar
