#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lsm::csv {

// Minimal CSV support for the plain numeric files this project exchanges.
// No quoting; '#'-prefixed lines are treated as comments/metadata by readers
// that ask for them.

std::vector<std::string> split_line(const std::string& line, char sep = ',');

struct Table {
    std::vector<std::string> comments;              // leading '#' lines, verbatim
    std::vector<std::vector<std::string>> rows;     // everything else, split
};

Table read(const std::filesystem::path& path);      // throws IoError

void write_line(std::ostream& out, const std::vector<std::string>& fields, char sep = ',');

// Round-trippable formatting for doubles ("%.17g").
std::string fmt_double(double v);

} // namespace lsm::csv
