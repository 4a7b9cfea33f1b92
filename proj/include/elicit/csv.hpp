#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace elicit::csv {

/// Rows of comma-separated fields. Blank lines and lines starting with '#'
/// are skipped; fields are trimmed. No quoting support.
std::vector<std::vector<std::string>> parse(std::string_view text);

/// Shortest decimal text that round-trips to the same double.
std::string format(double value);

int to_int(const std::string& field);
double to_double(const std::string& field);

/// Throws ContractError unless `row` equals `expected` field by field.
void expect_header(const std::vector<std::string>& row,
                   const std::vector<std::string>& expected);

}  // namespace elicit::csv
