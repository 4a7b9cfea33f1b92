#include "elicit/csv.hpp"

#include <charconv>
#include <sstream>

#include "elicit/errors.hpp"

namespace elicit::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.emplace_back(trim(line.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                 : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string format(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

int to_int(const std::string& field) {
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ContractError("expected an integer, got '" + field + "'");
  }
  return value;
}

double to_double(const std::string& field) {
  double value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ContractError("expected a number, got '" + field + "'");
  }
  return value;
}

void expect_header(const std::vector<std::string>& row,
                   const std::vector<std::string>& expected) {
  if (row != expected) {
    std::ostringstream os;
    os << "expected header '";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      os << (i ? "," : "") << expected[i];
    }
    os << "'";
    throw ContractError(os.str());
  }
}

}  // namespace elicit::csv
