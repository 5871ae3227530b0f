#include "perfpred/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "perfpred/csv.hpp"
#include "perfpred/errors.hpp"

namespace perfpred {

namespace {
constexpr const char* kTraceHeader =
    "t,epsilon,epsilon_bar,C,accuracy,consistency,model_gap,dual_gap,n";
}

std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trace_to_csv(const RrmTrace& trace) {
    std::string out = kTraceHeader;
    out.push_back('\n');
    for (const RrmRecord& r : trace.rows) {
        out += std::to_string(r.t);
        out.push_back(',');
        out += format_g12(r.epsilon);
        out.push_back(',');
        out += format_g12(r.epsilon_bar);
        out.push_back(',');
        out += format_g12(r.C);
        out.push_back(',');
        out += format_g12(r.accuracy);
        out.push_back(',');
        out += format_g12(r.consistency);
        out.push_back(',');
        out += format_g12(r.model_gap);
        out.push_back(',');
        out += format_g12(r.dual_gap);
        out.push_back(',');
        out += std::to_string(r.n);
        out.push_back('\n');
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestionError("cannot write file: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IngestionError("short write: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_trace_csv(const std::string& path, const RrmTrace& trace) {
    write_file_atomic(path, trace_to_csv(trace));
}

RrmTrace read_trace_csv(const std::string& path) {
    const CsvTable table = read_csv_file(path);
    const CsvTable expected = parse_csv_text(std::string(kTraceHeader) + "\n", "header");
    if (table.header != expected.header)
        throw IngestionError(path + ": unexpected trace header");

    RrmTrace trace;
    auto num = [&](const std::string& cell, std::size_t row_index) {
        try {
            std::size_t pos = 0;
            double v = std::stod(cell, &pos);
            if (pos != cell.size()) throw std::invalid_argument("trailing chars");
            return v;
        } catch (const std::exception&) {
            throw IngestionError(path + ": non-numeric cell '" + cell +
                                 "' at data row " + std::to_string(row_index + 1));
        }
    };
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        RrmRecord r;
        r.t = static_cast<int>(num(cells[0], i));
        r.epsilon = num(cells[1], i);
        r.epsilon_bar = num(cells[2], i);
        r.C = num(cells[3], i);
        r.accuracy = num(cells[4], i);
        r.consistency = num(cells[5], i);
        r.model_gap = num(cells[6], i);
        r.dual_gap = num(cells[7], i);
        r.n = static_cast<int>(num(cells[8], i));
        trace.rows.push_back(r);
    }
    return trace;
}

}  // namespace perfpred
