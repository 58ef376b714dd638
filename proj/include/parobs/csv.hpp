#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "parobs/errors.hpp"

namespace parobs {

/// CSV emission: '.' decimal, comma separator, one header row, LF endings.
/// Doubles are printed with %.17g so reruns are byte-comparable.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : path_(path) {
        std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary);
        if (!out_) throw Error("cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
        columns_ = header.size();
    }

    CsvWriter& field(const std::string& v) {
        sep();
        row_ << v;
        return *this;
    }
    CsvWriter& field(int v) { return field(std::to_string(v)); }
    CsvWriter& field(long long v) { return field(std::to_string(v)); }
    CsvWriter& field(bool v) { return field(std::string(v ? "1" : "0")); }
    CsvWriter& field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return field(std::string(buf));
    }

    void end_row() {
        if (fields_ != columns_)
            throw Error("row with " + std::to_string(fields_) + " fields, header has " +
                        std::to_string(columns_));
        out_ << row_.str() << '\n';
        row_.str({});
        fields_ = 0;
    }

    const std::filesystem::path& path() const { return path_; }

private:
    void sep() {
        if (fields_) row_ << ',';
        ++fields_;
    }

    std::filesystem::path path_;
    std::ofstream out_;
    std::ostringstream row_;
    std::size_t columns_ = 0;
    std::size_t fields_ = 0;
};

/// Minimal CSV reader used by the schema self-test.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            throw Error("CRLF line ending in " + path.string());
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        fields.push_back(cur);
        if (first) {
            table.header = fields;
            first = false;
        } else {
            if (fields.size() != table.header.size())
                throw Error("ragged row in " + path.string());
            table.rows.push_back(fields);
        }
    }
    return table;
}

/// Checks that an emitted file carries exactly the declared column set.
inline void check_schema(const std::filesystem::path& path,
                         const std::vector<std::string>& expected_header) {
    const CsvTable t = read_csv(path);
    if (t.header != expected_header)
        throw Error("schema mismatch in " + path.string());
}

}  // namespace parobs
