#include "lsm/trace.hpp"

#include <fstream>

#include "lsm/csv.hpp"
#include "lsm/errors.hpp"

namespace lsm {

void StateTrace::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    for (size_t n = 0; n < neurons_; ++n) {
        if (n) out << ',';
        out << 'n' << n;
    }
    out << '\n';
    for (size_t t = 0; t < steps_; ++t) {
        for (size_t n = 0; n < neurons_; ++n) {
            if (n) out << ',';
            out << csv::fmt_double(at(t, n));
        }
        out << '\n';
    }
}

StateTrace StateTrace::read_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.rows.empty())
        throw FormatError("trace file " + path.string() + " is empty");
    const size_t neurons = table.rows[0].size();
    StateTrace trace(table.rows.size() - 1, neurons, false);
    for (size_t t = 1; t < table.rows.size(); ++t) {
        const auto& row = table.rows[t];
        if (row.size() != neurons)
            throw FormatError("trace file " + path.string() + ": ragged row");
        for (size_t n = 0; n < neurons; ++n)
            trace.set(t - 1, n, std::stod(row[n]));
    }
    return trace;
}

} // namespace lsm
