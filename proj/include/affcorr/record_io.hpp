#pragma once

#include <string>

#include "affcorr/record.hpp"

namespace affcorr {

// Serializes one record as a single JSON line. Fields appear in a fixed
// order and numbers use the shortest decimal form that parses back to the
// same binary64 value, so identical records always produce identical bytes.
// Non-finite optional diagnostics are emitted as null.
std::string to_json_line(const CorrespondenceRecord& record);

// Parses one JSON line. Field order is free; unknown keys are rejected.
// Throws RecordError with code "parse-error", "missing-field", "non-finite",
// "invalid-rotation" or "degenerate-plane".
CorrespondenceRecord parse_record(const std::string& line);

// Appends the shortest round-trip decimal form of v.
void append_number(std::string& out, double v);

}  // namespace affcorr
