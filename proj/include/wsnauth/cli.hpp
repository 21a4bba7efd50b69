#ifndef WSNAUTH_CLI_HPP
#define WSNAUTH_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace wsnauth {

// Exit codes: 0 success, 1 protocol abort, 2 usage or configuration error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace wsnauth

#endif
