#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace foliate {

// CLI output tables. Doubles are serialized with 17 significant digits in
// both formats so repeated runs are byte-identical and values round-trip
// exactly.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double17(double v);

/// Comma-separated, header row, LF line endings.
void write_csv(const Dataset& data, std::ostream& out);

/// One top-level object: {"meta": {...}, "data": [[...], ...]}. `meta` holds
/// the fully resolved configuration plus the column names.
void write_json(const Dataset& data, const std::vector<std::pair<std::string, Cell>>& meta,
                std::ostream& out);

}  // namespace foliate
