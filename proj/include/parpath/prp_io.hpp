#pragma once

// Binary dumps (little-endian, layout in docs/FORMAT.md) and CSV tables.

#include <string>

#include "parpath/core.hpp"
#include "parpath/rough_path.hpp"

namespace parpath {

void save_prp(const std::string& path, const PartialRoughPath& prp);
PartialRoughPath load_prp(const std::string& path);
std::string encode_prp(const PartialRoughPath& prp);
PartialRoughPath decode_prp(const std::string& bytes);

void save_rough_path(const std::string& path, const RoughPath& rp);
RoughPath load_rough_path(const std::string& path);
std::string encode_rough_path(const RoughPath& rp);
RoughPath decode_rough_path(const std::string& bytes);

/// Columns: node, t, xhat_1..xhat_e, X (the X^(0) components).
void write_prp_csv(const std::string& path, const PartialRoughPath& prp);

/// Round-trip decimal form used by every CSV/JSON writer.
std::string format_double(double v);

}  // namespace parpath
