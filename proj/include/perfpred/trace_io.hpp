#pragma once

#include <string>
#include <vector>

#include "perfpred/rrm.hpp"

namespace perfpred {

// Formats a double with 12 significant digits ('.' decimal, no locale).
std::string format_g12(double v);

// Trace CSV layout: header
//   t,epsilon,epsilon_bar,C,accuracy,consistency,model_gap,dual_gap,n
// one row per iteration, LF line endings, values at 12 significant digits.
std::string trace_to_csv(const RrmTrace& trace);

// Writes to a temp file in the target directory and renames over the final
// path, so concurrent writers never expose partial files.
void write_file_atomic(const std::string& path, const std::string& content);

void write_trace_csv(const std::string& path, const RrmTrace& trace);

// Parses a trace CSV produced by write_trace_csv. Only the serialized
// columns are restored. Throws IngestionError on malformed input.
RrmTrace read_trace_csv(const std::string& path);

}  // namespace perfpred
