#include "lsm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "lsm/errors.hpp"

namespace lsm::csv {

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    Table table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            table.comments.push_back(line);
            continue;
        }
        table.rows.push_back(split_line(line));
    }
    return table;
}

void write_line(std::ostream& out, const std::vector<std::string>& fields, char sep) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out << sep;
        out << fields[i];
    }
    out << '\n';
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace lsm::csv
