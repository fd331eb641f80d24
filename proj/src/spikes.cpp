#include "lsm/spikes.hpp"

#include <fstream>
#include <sstream>

#include "lsm/csv.hpp"
#include "lsm/errors.hpp"

namespace lsm {

void SpikeTrainSet::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "# dt=" << csv::fmt_double(dt) << " label=" << label << " seed=" << seed << '\n';
    for (size_t c = 0; c < channels; ++c) {
        for (size_t t = 0; t < timesteps; ++t) {
            if (t) out << ',';
            out << int(at(c, t));
        }
        out << '\n';
    }
}

SpikeTrainSet SpikeTrainSet::read_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.rows.empty())
        throw FormatError("spike file " + path.string() + " has no channel rows");
    SpikeTrainSet set(table.rows.size(), table.rows[0].size());
    for (const std::string& comment : table.comments) {
        std::istringstream meta(comment.substr(1));
        std::string field;
        while (meta >> field) {
            const size_t eq = field.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "dt")
                set.dt = std::stod(value);
            else if (key == "label")
                set.label = std::stoi(value);
            else if (key == "seed")
                set.seed = std::stoull(value);
        }
    }
    for (size_t c = 0; c < set.channels; ++c) {
        const auto& row = table.rows[c];
        if (row.size() != set.timesteps)
            throw FormatError("spike file " + path.string() + ": ragged row " +
                              std::to_string(c));
        for (size_t t = 0; t < set.timesteps; ++t) {
            if (row[t] == "0")
                set.set(c, t, false);
            else if (row[t] == "1")
                set.set(c, t, true);
            else
                throw FormatError("spike file " + path.string() + ": non-binary cell '" +
                                  row[t] + "'");
        }
    }
    return set;
}

} // namespace lsm
