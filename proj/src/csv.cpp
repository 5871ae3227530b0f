#include "perfpred/csv.hpp"

#include <fstream>
#include <sstream>

#include "perfpred/errors.hpp"

namespace perfpred {

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open CSV file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_text(buf.str(), path);
}

CsvTable parse_csv_text(const std::string& text, const std::string& origin) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any_field = false;
    std::size_t line = 1;

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        any_field = false;
    };
    auto end_record = [&]() {
        end_field();
        if (table.header.empty()) {
            table.header = record;
        } else {
            if (record.size() != table.header.size()) {
                throw IngestionError(origin + ": row at line " + std::to_string(line) +
                                     " has " + std::to_string(record.size()) +
                                     " fields, header has " +
                                     std::to_string(table.header.size()));
            }
            table.rows.push_back(record);
        }
        record.clear();
    };

    std::size_t i = 0;
    const std::size_t size = text.size();
    while (i < size) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < size && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
                if (c == '\n') ++line;
            }
        } else if (c == '"' && field.empty() && !any_field) {
            in_quotes = true;
            any_field = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record();
            ++line;
        } else {
            field.push_back(c);
            any_field = true;
        }
        ++i;
    }
    if (in_quotes) throw IngestionError(origin + ": unterminated quoted field");
    if (!field.empty() || !record.empty()) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        end_record();
    }
    if (table.header.empty()) throw IngestionError(origin + ": empty CSV");
    return table;
}

}  // namespace perfpred
