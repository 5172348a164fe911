#pragma once

// Output plumbing shared by the batch tool: stable float formatting so
// reruns are byte-identical, comma-separated tables, and atomic file
// replacement via a temporary sibling.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uscqec::io {

inline std::string format_g(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv: row width does not match the header");
        rows.push_back(std::move(row));
    }

    std::string render() const {
        std::string out;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c) out += ',';
            out += header[c];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += row[c];
            }
            out += '\n';
        }
        return out;
    }
};

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("io: cannot open " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("io: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace uscqec::io
