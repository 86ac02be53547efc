#include "config_file.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace bhtlab::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool given(const std::vector<std::string>& args, const std::string& key)
{
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(number) + " is not key = value");
        }
        std::string key = trim(body.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(number) + " has an empty key");
        out.emplace_back(key, trim(body.substr(eq + 1)));
    }
    return out;
}

std::vector<std::string> merge_config_file(const std::vector<std::string>& args)
{
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) return rest;

    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    const auto entries = parse_config(in);

    const auto sub = std::find_if(rest.begin(), rest.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    const auto at = sub == rest.end() ? rest.end() : std::next(sub);
    std::vector<std::string> spliced;
    for (const auto& [key, value] : entries) {
        if (!given(rest, key)) spliced.push_back("--" + key + "=" + value);
    }
    rest.insert(at, spliced.begin(), spliced.end());
    return rest;
}

}  // namespace bhtlab::cli
