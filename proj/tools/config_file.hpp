#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace bhtlab::cli {

// key = value lines; blank lines and lines starting with '#' are skipped. Throws on a line
// without '=' or with an empty key.
std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in);

// Removes --config PATH (or --config=PATH) from the arguments and splices the file's entries in
// as --key=value right after the subcommand. Keys already given as flags keep their flag value.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args);

}  // namespace bhtlab::cli
