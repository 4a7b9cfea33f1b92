#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "elicit/bt.hpp"
#include "elicit/protocol.hpp"
#include "elicit/stimulus.hpp"

namespace elicit {

enum class SinkKind { Log, File, Stream };

std::string_view to_string(SinkKind kind);
SinkKind parse_sink_kind(std::string_view text);

struct PresenterConfig {
  SinkKind sink = SinkKind::Log;
  /// Directory for trajectory files written by the file sink.
  std::string file_dir = "presentations";
  std::string stream_host = "127.0.0.1";
  int stream_port = 7700;
  int stream_timeout_ms = 250;
  int stream_attempts = 2;
  StrokeRepeat stroke_repeat = StrokeRepeat::Wrap;
};

struct ServiceConfig {
  int port = 8080;
  std::string bind_address = "127.0.0.1";
  std::string data_dir = "data";
  /// Bearer token for experimenter routes; empty disables them.
  std::string experimenter_token;
  /// Optional directory of static UI assets served at /.
  std::string static_dir;
};

struct AppConfig {
  ScheduleRule schedule;
  EstimatorOptions bt;
  PresenterConfig presenter;
  ServiceConfig service;
};

inline constexpr std::string_view kEnvPrefix = "ELICIT_";

/// Parses INI-style text:
///
///   [schedule]  repeats_by_gap = 2,1   synthetic_weight = 1
///   [bt]        alpha  tol  max_iter  normalize_on = log|natural
///   [presenter] sink = log|file|stream  file_dir  stream_host  stream_port
///               stream_timeout_ms  stream_attempts  stroke_repeat = wrap|clamp
///   [service]   port  bind_address  data_dir  experimenter_token  static_dir
///
/// Unknown sections or keys are errors.
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::string& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Applies ELICIT_<SECTION>_<KEY> overrides, e.g. ELICIT_BT_ALPHA=0.05.
void apply_env_overrides(AppConfig& config, const EnvLookup& lookup = process_env);

}  // namespace elicit
