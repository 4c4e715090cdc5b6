#pragma once

#include <iosfwd>
#include <string>

#include "lvhba/solver.hpp"

namespace lvhba {

/// Fixed CSV header: k,c_k,F,f,gap,residual,merit,dxy,dz,dtl,sec.
/// Numbers are written with 17 significant digits so parsing them back
/// reproduces the doubles exactly; absent cadenced fields are empty cells.
void write_trace_csv(std::ostream& os, const Trace& trace);
std::string trace_csv(const Trace& trace);

/// Parses a CSV produced by write_trace_csv. Metadata is not part of the CSV
/// and is left default. Throws std::invalid_argument on malformed input.
Trace parse_trace_csv(std::istream& is);
Trace parse_trace_csv(const std::string& text);

/// JSON form: {"records": [...], "metadata": {...}} with every effective
/// solver parameter in the metadata object.
std::string trace_json(const Trace& trace, int indent = 2);

}  // namespace lvhba
