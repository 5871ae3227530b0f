#pragma once

#include <string>
#include <vector>

namespace perfpred {

// Minimal RFC-4180-style reader: headered, comma separated, double-quote
// escaping, LF or CRLF line endings, UTF-8 passthrough.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; -1 if absent.
    int column(const std::string& name) const;
};

CsvTable read_csv_file(const std::string& path);
CsvTable parse_csv_text(const std::string& text, const std::string& origin);

}  // namespace perfpred
