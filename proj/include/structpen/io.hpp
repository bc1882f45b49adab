#pragma once

#include <string>
#include <vector>

#include "structpen/core.hpp"
#include "structpen/tree.hpp"

namespace structpen {
namespace io {

/// Comma-separated decimals, e.g. "1,2.5,-3".
Vector parse_vector(const std::string& text);

/// Headerless CSV: one row per line, comma-separated decimals.
Matrix read_matrix_csv(const std::string& path);
Vector read_vector_csv(const std::string& path);  // one value per line or row

/// "v,parent" lines with 1-based vertex ids; the root line has an empty
/// parent field.
RootedTree read_tree(const std::string& path);

/// Lines of comma-separated 1-based indices, one group per line.
std::vector<std::vector<int>> read_groups(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace io
}  // namespace structpen
