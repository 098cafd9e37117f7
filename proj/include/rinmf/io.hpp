#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rinmf/matrix.hpp"
#include "rinmf/rules.hpp"

namespace rinmf {

// Rectangular numeric CSV, no header, one row per entity. Rejects ragged
// rows, non-numeric cells, and negative or non-finite entries, naming the
// 1-based (row, column) location.
Matrix load_dataset(const std::filesystem::path& path);

// Same format minus the non-negativity requirement; factor matrices written
// by this tool load back through here.
Matrix load_matrix_csv(const std::filesystem::path& path);

// JSON Lines, one rule per line:
//   {"id": "r0", "support": [0,1,2], "label": "c1", "quality": 0.93}
// label and quality are optional. Entity indices are 0-based row indices
// of the data matrix and must be < m.
RuleSet load_rules(const std::filesystem::path& path, std::size_t m);

// Plain text, one cluster per line as space-separated 0-based entity
// indices. Cluster order defines factor order.
std::vector<std::vector<std::size_t>>
load_clusters(const std::filesystem::path& path, std::size_t m);

void save_clusters(const std::filesystem::path& path,
                   const std::vector<std::vector<std::size_t>>& clusters);

// Headerless numeric CSV with 17 significant digits; round-trips exactly.
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);

// 17-significant-digit decimal formatting used for every float the tool
// emits; enough digits to round-trip doubles exactly.
std::string format_double(double v);

// FNV-1a 64-bit over the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

} // namespace rinmf
