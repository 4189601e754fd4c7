#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace causalsheet {

// Column-oriented table of categorical observations. Cell values are level
// codes into the per-variable label dictionary.
struct Dataset {
    std::vector<std::string> variable_names;
    std::vector<std::vector<std::string>> level_labels;   // one dictionary per variable
    std::vector<std::vector<std::uint8_t>> columns;       // columns[var][row]

    int num_vars() const { return static_cast<int>(variable_names.size()); }
    int num_rows() const { return columns.empty() ? 0 : static_cast<int>(columns[0].size()); }
    int cardinality(int v) const { return static_cast<int>(level_labels.at(v).size()); }

    void validate() const;  // throws std::invalid_argument on broken invariants

    void write_csv(std::ostream& os) const;
    // Header row required; labels are interned in order of first appearance.
    // Throws MalformedCsv on ragged rows, empty input, or >255 levels.
    static Dataset read_csv(std::istream& is);
    static Dataset read_csv_file(const std::string& path);
    void write_csv_file(const std::string& path) const;
};

}  // namespace causalsheet
