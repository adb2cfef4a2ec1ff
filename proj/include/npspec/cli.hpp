#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace npspec::cli {

// Entry point shared by the binary and the tests. args excludes argv[0].
// Exit codes: 0 success, 2 configuration/schema violation, 3 numerical
// failure.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace npspec::cli
