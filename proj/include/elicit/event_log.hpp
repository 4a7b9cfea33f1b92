#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace elicit {

/// One line of a session's append-only log.
struct Event {
  std::int64_t timestamp_ms = 0;
  std::string session_id;
  std::string event_type;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Event&) const = default;
};

/// Single-line JSON record with keys timestamp, session_id, event_type,
/// payload.
std::string to_line(const Event& event);
Event event_from_line(std::string_view line);

std::string to_jsonl(const std::vector<Event>& events);
std::vector<Event> events_from_jsonl(std::string_view text);

/// Appends and flushes one record. Throws std::runtime_error on I/O failure.
void append_event(const std::filesystem::path& path, const Event& event);
std::vector<Event> read_event_log(const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace elicit
