#pragma once

#include <string>

#include "peagnn/hin.hpp"

namespace peagnn {

// On-disk HIN: <dir>/hin.json manifest (types, relation table, labels) plus
// one flat little-endian binary per CSR component and interaction column.
void save_hin(const Hin& hin, const std::string& dir);
Hin load_hin(const std::string& dir);

// Content hash over the canonical serialization; identical graphs hash
// identically regardless of where they were ingested.
std::string hin_content_hash(const Hin& hin);

}  // namespace peagnn
