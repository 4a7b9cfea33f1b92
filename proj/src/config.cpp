#include "elicit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "elicit/csv.hpp"
#include "elicit/errors.hpp"

namespace elicit {

namespace {

struct Key {
  const char* section;
  const char* name;
};

constexpr Key kKeys[] = {
    {"schedule", "repeats_by_gap"},   {"schedule", "synthetic_weight"},
    {"bt", "alpha"},                  {"bt", "tol"},
    {"bt", "max_iter"},               {"bt", "normalize_on"},
    {"presenter", "sink"},            {"presenter", "file_dir"},
    {"presenter", "stream_host"},     {"presenter", "stream_port"},
    {"presenter", "stream_timeout_ms"}, {"presenter", "stream_attempts"},
    {"presenter", "stroke_repeat"},   {"service", "port"},
    {"service", "bind_address"},      {"service", "data_dir"},
    {"service", "experimenter_token"}, {"service", "static_dir"},
};

std::string field(const Key& key) {
  return std::string(key.section) + "." + key.name;
}

template <typename Parse>
auto parse_field(const Key& key, const std::string& value, Parse parse) {
  try {
    return parse(value);
  } catch (const Error& e) {
    throw ConfigError(field(key) + ": " + e.what());
  }
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  const auto rows = csv::parse(value);
  if (rows.size() != 1) throw ContractError("expected a comma-separated list");
  for (const auto& item : rows.front()) out.push_back(csv::to_int(item));
  return out;
}

StrokeRepeat parse_stroke_repeat(const std::string& value) {
  if (value == "wrap") return StrokeRepeat::Wrap;
  if (value == "clamp") return StrokeRepeat::Clamp;
  throw ConfigError("expected wrap or clamp");
}

void set_value(AppConfig& config, const Key& key, const std::string& value) {
  const std::string section = key.section;
  const std::string name = key.name;
  const auto as_int = [&](const std::string& v) { return csv::to_int(v); };
  const auto as_double = [&](const std::string& v) { return csv::to_double(v); };

  if (section == "schedule") {
    if (name == "repeats_by_gap") {
      config.schedule.repeats_by_gap = parse_field(key, value, parse_int_list);
    } else {
      config.schedule.synthetic_weight = parse_field(key, value, as_int);
    }
  } else if (section == "bt") {
    if (name == "alpha") {
      config.bt.alpha = parse_field(key, value, as_double);
    } else if (name == "tol") {
      config.bt.tol = parse_field(key, value, as_double);
    } else if (name == "max_iter") {
      config.bt.max_iter = parse_field(key, value, as_int);
    } else {
      config.bt.normalize_on = parse_field(
          key, value, [](const std::string& v) { return parse_normalize_on(v); });
    }
  } else if (section == "presenter") {
    auto& p = config.presenter;
    if (name == "sink") {
      p.sink = parse_field(key, value,
                           [](const std::string& v) { return parse_sink_kind(v); });
    } else if (name == "file_dir") {
      p.file_dir = value;
    } else if (name == "stream_host") {
      p.stream_host = value;
    } else if (name == "stream_port") {
      p.stream_port = parse_field(key, value, as_int);
    } else if (name == "stream_timeout_ms") {
      p.stream_timeout_ms = parse_field(key, value, as_int);
    } else if (name == "stream_attempts") {
      p.stream_attempts = parse_field(key, value, as_int);
    } else {
      p.stroke_repeat = parse_field(key, value, parse_stroke_repeat);
    }
  } else {
    auto& s = config.service;
    if (name == "port") {
      s.port = parse_field(key, value, as_int);
    } else if (name == "bind_address") {
      s.bind_address = value;
    } else if (name == "data_dir") {
      s.data_dir = value;
    } else if (name == "experimenter_token") {
      s.experimenter_token = value;
    } else {
      s.static_dir = value;
    }
  }
}

const Key* find_key(const std::string& section, const std::string& name) {
  for (const auto& key : kKeys) {
    if (section == key.section && name == key.name) return &key;
  }
  return nullptr;
}

void validate(const AppConfig& config) {
  config.schedule.validate();
  if (!(config.bt.alpha >= 0.0)) throw ConfigError("bt.alpha must be >= 0");
  if (!(config.bt.tol > 0.0)) throw ConfigError("bt.tol must be positive");
  if (config.bt.max_iter < 1) throw ConfigError("bt.max_iter must be positive");
  if (config.presenter.stream_attempts < 1) {
    throw ConfigError("presenter.stream_attempts must be >= 1");
  }
  if (config.service.port < 0 || config.service.port > 65535) {
    throw ConfigError("service.port out of range");
  }
}

}  // namespace

std::string_view to_string(SinkKind kind) {
  switch (kind) {
    case SinkKind::Log:
      return "log";
    case SinkKind::File:
      return "file";
    case SinkKind::Stream:
      return "stream";
  }
  return "log";
}

SinkKind parse_sink_kind(std::string_view text) {
  if (text == "log") return SinkKind::Log;
  if (text == "file") return SinkKind::File;
  if (text == "stream") return SinkKind::Stream;
  throw ConfigError("presenter sink must be log, file or stream, got '" +
                    std::string(text) + "'");
}

AppConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  AppConfig config;
  for (const auto& [section, entries] : tree) {
    if (entries.empty() && !entries.data().empty()) {
      throw ConfigError("config: key '" + section + "' must be inside a section");
    }
    for (const auto& [name, value] : entries) {
      const Key* key = find_key(section, name);
      if (key == nullptr) {
        throw ConfigError("config: unknown key " + section + "." + name);
      }
      set_value(config, *key, value.data());
    }
  }
  validate(config);
  return config;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::optional<std::string> process_env(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (value == nullptr) return std::nullopt;
  return std::string(value);
}

void apply_env_overrides(AppConfig& config, const EnvLookup& lookup) {
  for (const auto& key : kKeys) {
    std::string name = std::string(kEnvPrefix) + key.section + "_" + key.name;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const auto value = lookup(name)) set_value(config, key, *value);
  }
  validate(config);
}

}  // namespace elicit
