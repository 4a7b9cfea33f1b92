#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "elicit/config.hpp"
#include "elicit/stimulus.hpp"

namespace elicit {

/// Request to render one stimulus on the (external) display hardware.
struct PresentCommand {
  std::string session_id;
  int stimulus_id = 0;
  /// "catalog:<id>"; receivers regenerate frames from the spec.
  std::string trajectory_ref;
  std::int64_t issued_at = 0;
  /// Per-session sequence number of the presentation.
  std::size_t sequence = 0;

  nlohmann::json to_json(const StimulusSpec& spec) const;
};

struct DeliveryStatus {
  bool delivered = false;
  std::string detail;
};

class PresenterSink {
 public:
  virtual ~PresenterSink() = default;
  virtual std::string_view name() const = 0;
  virtual DeliveryStatus dispatch(const PresentCommand& command,
                                  const StimulusSpec& spec) = 0;
};

/// Nothing to deliver: the event log entry is the presentation record.
class LogSink final : public PresenterSink {
 public:
  std::string_view name() const override { return "log"; }
  DeliveryStatus dispatch(const PresentCommand&, const StimulusSpec&) override {
    return {true, "logged"};
  }
};

/// Writes <dir>/<session>/<sequence>_stim<id>.csv trajectory exports.
class FileSink final : public PresenterSink {
 public:
  FileSink(std::filesystem::path directory, StrokeRepeat repeat)
      : directory_(std::move(directory)), repeat_(repeat) {}

  std::string_view name() const override { return "file"; }
  DeliveryStatus dispatch(const PresentCommand& command,
                          const StimulusSpec& spec) override;

  std::filesystem::path path_for(const PresentCommand& command) const;

 private:
  std::filesystem::path directory_;
  StrokeRepeat repeat_;
};

/// Sends each command as a length-prefixed JSON frame (4-byte big-endian
/// length, then UTF-8 JSON) over a fresh TCP connection.
class StreamSink final : public PresenterSink {
 public:
  StreamSink(std::string host, int port, int timeout_ms, int attempts)
      : host_(std::move(host)),
        port_(port),
        timeout_ms_(timeout_ms),
        attempts_(attempts) {}

  std::string_view name() const override { return "stream"; }
  DeliveryStatus dispatch(const PresentCommand& command,
                          const StimulusSpec& spec) override;

 private:
  std::string host_;
  int port_;
  int timeout_ms_;
  int attempts_;
};

std::unique_ptr<PresenterSink> make_sink(const PresenterConfig& config);

/// Big-endian length prefix followed by the payload bytes.
std::string frame_message(std::string_view payload);

}  // namespace elicit
