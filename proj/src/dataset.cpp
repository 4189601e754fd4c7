#include "causalsheet/dataset.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "causalsheet/errors.hpp"

namespace causalsheet {

void Dataset::validate() const {
    if (variable_names.size() != level_labels.size() || variable_names.size() != columns.size())
        throw std::invalid_argument("Dataset: field sizes disagree");
    for (int v = 0; v < num_vars(); ++v) {
        if (columns[v].size() != columns[0].size())
            throw std::invalid_argument("Dataset: ragged columns");
        for (std::uint8_t code : columns[v])
            if (code >= level_labels[v].size())
                throw std::invalid_argument("Dataset: level code out of range");
    }
}

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::ostream& os, const std::string& s) {
    if (!needs_quoting(s)) {
        os << s;
        return;
    }
    os << '"';
    for (char c : s) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
    std::vector<std::string> cells;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw MalformedCsv("line " + std::to_string(lineno) + ": quote inside unquoted cell");
            in_quotes = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) throw MalformedCsv("line " + std::to_string(lineno) + ": unterminated quote");
    cells.push_back(std::move(cur));
    return cells;
}

}  // namespace

void Dataset::write_csv(std::ostream& os) const {
    for (int v = 0; v < num_vars(); ++v) {
        if (v) os << ',';
        write_cell(os, variable_names[v]);
    }
    os << '\n';
    const int rows = num_rows();
    for (int r = 0; r < rows; ++r) {
        for (int v = 0; v < num_vars(); ++v) {
            if (v) os << ',';
            write_cell(os, level_labels[v][columns[v][r]]);
        }
        os << '\n';
    }
}

Dataset Dataset::read_csv(std::istream& is) {
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw MalformedCsv("empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;

    Dataset ds;
    ds.variable_names = split_csv_line(line, lineno);
    if (ds.variable_names.empty() || (ds.variable_names.size() == 1 && ds.variable_names[0].empty()))
        throw MalformedCsv("missing header row");
    const int n = static_cast<int>(ds.variable_names.size());
    ds.level_labels.resize(n);
    ds.columns.resize(n);
    std::vector<std::unordered_map<std::string, std::uint8_t>> dict(n);

    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++lineno;
        if (line.empty() && is.peek() == std::char_traits<char>::eof()) break;  // trailing newline
        auto cells = split_csv_line(line, lineno);
        if (static_cast<int>(cells.size()) != n)
            throw MalformedCsv("line " + std::to_string(lineno) + ": expected " + std::to_string(n) +
                               " cells, got " + std::to_string(cells.size()));
        for (int v = 0; v < n; ++v) {
            auto it = dict[v].find(cells[v]);
            std::uint8_t code;
            if (it == dict[v].end()) {
                if (dict[v].size() >= 255)
                    throw MalformedCsv("column " + ds.variable_names[v] + ": more than 255 levels");
                code = static_cast<std::uint8_t>(dict[v].size());
                dict[v].emplace(cells[v], code);
                ds.level_labels[v].push_back(cells[v]);
            } else {
                code = it->second;
            }
            ds.columns[v].push_back(code);
        }
    }
    return ds;
}

Dataset Dataset::read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MalformedCsv("cannot open " + path);
    return read_csv(is);
}

void Dataset::write_csv_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(os);
}

}  // namespace causalsheet
