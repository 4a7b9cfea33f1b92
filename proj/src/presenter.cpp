#include "elicit/presenter.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>

namespace elicit {

namespace {

// Owns a socket descriptor.
class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

DeliveryStatus send_once(const std::string& host, int port, int timeout_ms,
                         const std::string& frame) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0 ||
      found == nullptr) {
    return {false, "cannot resolve " + host};
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> addresses(found,
                                                                 ::freeaddrinfo);
  Socket sock(::socket(found->ai_family, found->ai_socktype, found->ai_protocol));
  if (sock.get() < 0) return {false, std::strerror(errno)};

  const int flags = ::fcntl(sock.get(), F_GETFL, 0);
  ::fcntl(sock.get(), F_SETFL, flags | O_NONBLOCK);
  if (::connect(sock.get(), found->ai_addr, found->ai_addrlen) != 0) {
    if (errno != EINPROGRESS) return {false, std::strerror(errno)};
    pollfd pfd{sock.get(), POLLOUT, 0};
    if (::poll(&pfd, 1, timeout_ms) <= 0) return {false, "connect timed out"};
    int error = 0;
    socklen_t length = sizeof error;
    ::getsockopt(sock.get(), SOL_SOCKET, SO_ERROR, &error, &length);
    if (error != 0) return {false, std::strerror(error)};
  }
  ::fcntl(sock.get(), F_SETFL, flags);

  std::size_t sent = 0;
  while (sent < frame.size()) {
    const auto n = ::send(sock.get(), frame.data() + sent, frame.size() - sent,
                          MSG_NOSIGNAL);
    if (n <= 0) return {false, std::strerror(errno)};
    sent += static_cast<std::size_t>(n);
  }
  return {true, "sent " + std::to_string(frame.size()) + " bytes"};
}

}  // namespace

nlohmann::json PresentCommand::to_json(const StimulusSpec& spec) const {
  return {{"session_id", session_id},
          {"stimulus_id", stimulus_id},
          {"trajectory_ref", trajectory_ref},
          {"issued_at", issued_at},
          {"sequence", sequence},
          {"pattern", std::string(elicit::to_string(spec.pattern))},
          {"speed_mm_s", spec.speed},
          {"duration_s", spec.duration},
          {"update_rate_hz", spec.update_rate}};
}

std::filesystem::path FileSink::path_for(const PresentCommand& command) const {
  return directory_ / command.session_id /
         (std::to_string(command.sequence) + "_stim" +
          std::to_string(command.stimulus_id) + ".csv");
}

DeliveryStatus FileSink::dispatch(const PresentCommand& command,
                                  const StimulusSpec& spec) {
  const auto path = path_for(command);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) return {false, ec.message()};
  std::ofstream out(path, std::ios::binary);
  out << trajectory_to_csv(generate_trajectory(spec, repeat_));
  if (!out) return {false, "cannot write " + path.string()};
  return {true, path.string()};
}

DeliveryStatus StreamSink::dispatch(const PresentCommand& command,
                                    const StimulusSpec& spec) {
  const auto frame = frame_message(command.to_json(spec).dump());
  DeliveryStatus status;
  for (int attempt = 0; attempt < attempts_; ++attempt) {
    status = send_once(host_, port_, timeout_ms_, frame);
    if (status.delivered) return status;
  }
  return status;
}

std::unique_ptr<PresenterSink> make_sink(const PresenterConfig& config) {
  switch (config.sink) {
    case SinkKind::Log:
      return std::make_unique<LogSink>();
    case SinkKind::File:
      return std::make_unique<FileSink>(config.file_dir, config.stroke_repeat);
    case SinkKind::Stream:
      return std::make_unique<StreamSink>(config.stream_host, config.stream_port,
                                          config.stream_timeout_ms,
                                          config.stream_attempts);
  }
  return std::make_unique<LogSink>();
}

std::string frame_message(std::string_view payload) {
  const auto length = static_cast<std::uint32_t>(payload.size());
  std::string frame(4, '\0');
  frame[0] = static_cast<char>((length >> 24) & 0xff);
  frame[1] = static_cast<char>((length >> 16) & 0xff);
  frame[2] = static_cast<char>((length >> 8) & 0xff);
  frame[3] = static_cast<char>(length & 0xff);
  frame.append(payload);
  return frame;
}

}  // namespace elicit
