#include "elicit/event_log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "elicit/errors.hpp"

namespace elicit {

std::string to_line(const Event& event) {
  const nlohmann::json j = {{"timestamp", event.timestamp_ms},
                            {"session_id", event.session_id},
                            {"event_type", event.event_type},
                            {"payload", event.payload}};
  return j.dump();
}

Event event_from_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Event event;
    event.timestamp_ms = j.at("timestamp").get<std::int64_t>();
    event.session_id = j.at("session_id").get<std::string>();
    event.event_type = j.at("event_type").get<std::string>();
    event.payload = j.at("payload");
    return event;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed event record: ") + e.what());
  }
}

std::string to_jsonl(const std::vector<Event>& events) {
  std::string out;
  for (const auto& event : events) {
    out += to_line(event);
    out += '\n';
  }
  return out;
}

std::vector<Event> events_from_jsonl(std::string_view text) {
  std::vector<Event> events;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    events.push_back(event_from_line(line));
  }
  return events;
}

void append_event(const std::filesystem::path& path, const Event& event) {
  const std::string line = to_line(event) + '\n';
  std::FILE* file = std::fopen(path.c_str(), "ab");
  if (file == nullptr) {
    throw std::runtime_error("cannot open event log " + path.string());
  }
  const bool ok = std::fwrite(line.data(), 1, line.size(), file) == line.size() &&
                  std::fflush(file) == 0;
  std::fclose(file);
  if (!ok) throw std::runtime_error("cannot write event log " + path.string());
}

std::vector<Event> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read event log " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return events_from_jsonl(buffer.str());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx",
                static_cast<unsigned long long>(hash));
  return out;
}

}  // namespace elicit
