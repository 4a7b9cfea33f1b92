#include "elicit/stimulus.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "elicit/errors.hpp"

namespace elicit {

namespace {

constexpr Pattern kPatternOrder[] = {Pattern::Static, Pattern::AM,
                                     Pattern::LMLow, Pattern::LMHigh,
                                     Pattern::TwoPoint};

void write_optional(std::ostream& os, const std::optional<double>& value) {
  if (value) os << *value;
}

nlohmann::json optional_json(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::optional<double> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

// Position along the stroke after travelling v*t.
double stroke_position(const StimulusSpec& spec, double t,
                       StrokeRepeat repeat) {
  const double travelled = spec.speed * t;
  if (repeat == StrokeRepeat::Clamp) {
    return std::min(travelled, std::nextafter(spec.path_length, 0.0));
  }
  double y = std::fmod(travelled, spec.path_length);
  if (y < 0.0) y += spec.path_length;
  return y;
}

}  // namespace

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::Static:
      return "Static";
    case Pattern::AM:
      return "AM";
    case Pattern::LMLow:
      return "LMLow";
    case Pattern::LMHigh:
      return "LMHigh";
    case Pattern::TwoPoint:
      return "TwoPoint";
  }
  return "Static";
}

Pattern parse_pattern(std::string_view text) {
  for (Pattern p : kPatternOrder) {
    if (to_string(p) == text) return p;
  }
  throw ContractError("unknown stimulus pattern '" + std::string(text) + "'");
}

StimulusSpec make_stimulus(int id, Pattern pattern, double speed) {
  StimulusSpec spec;
  spec.id = id;
  spec.pattern = pattern;
  spec.speed = speed;
  switch (pattern) {
    case Pattern::Static:
      break;
    case Pattern::AM:
      spec.am_frequency = kAmFrequencyHz;
      break;
    case Pattern::LMLow:
      spec.lm_wavelength = kLmLowWavelengthMm;
      spec.lm_displacement = kLmDisplacementMm;
      break;
    case Pattern::LMHigh:
      spec.lm_wavelength = kLmHighWavelengthMm;
      spec.lm_displacement = kLmDisplacementMm;
      break;
    case Pattern::TwoPoint:
      spec.two_point_offset = kTwoPointOffsetMm;
      break;
  }
  return spec;
}

std::vector<StimulusSpec> default_catalog() {
  std::vector<StimulusSpec> catalog;
  catalog.reserve(kCatalogSize);
  int id = 0;
  for (Pattern pattern : kPatternOrder) {
    for (double speed : kSpeedsMmPerS) {
      catalog.push_back(make_stimulus(id++, pattern, speed));
    }
  }
  return catalog;
}

void validate(const StimulusSpec& spec) {
  const bool is_lm =
      spec.pattern == Pattern::LMLow || spec.pattern == Pattern::LMHigh;
  const auto fail = [&](const std::string& why) {
    throw ContractError("stimulus " + std::to_string(spec.id) + ": " + why);
  };
  if (!(spec.speed > 0.0)) fail("speed must be positive");
  if (!(spec.duration > 0.0) || !(spec.path_length > 0.0) ||
      !(spec.update_rate > 0.0)) {
    fail("duration, path length and update rate must be positive");
  }
  if (spec.am_frequency.has_value() != (spec.pattern == Pattern::AM)) {
    fail("am_frequency is required for AM and only AM");
  }
  if (spec.lm_wavelength.has_value() != is_lm ||
      spec.lm_displacement.has_value() != is_lm) {
    fail("wavelength and displacement are required for LM and only LM");
  }
  if (spec.two_point_offset.has_value() !=
      (spec.pattern == Pattern::TwoPoint)) {
    fail("two_point_offset is required for TwoPoint and only TwoPoint");
  }
  if (is_lm && !(*spec.lm_wavelength > 0.0)) fail("wavelength must be positive");
}

double lm_vibration_frequency(double speed, double wavelength) {
  if (!(speed > 0.0) || !(wavelength > 0.0)) {
    throw DomainError("lm_vibration_frequency requires v > 0 and lambda > 0");
  }
  return speed / wavelength;
}

FocusFrame focus_frame_at(const StimulusSpec& spec, double t,
                          StrokeRepeat repeat) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  FocusFrame frame;
  frame.t = t;
  const double y = stroke_position(spec, t, repeat);
  switch (spec.pattern) {
    case Pattern::Static:
      frame.foci.push_back({0.0, y, 1.0});
      break;
    case Pattern::AM:
      frame.foci.push_back(
          {0.0, y, 0.5 * (1.0 + std::sin(two_pi * *spec.am_frequency * t))});
      break;
    case Pattern::LMLow:
    case Pattern::LMHigh:
      frame.foci.push_back(
          {*spec.lm_displacement * std::sin(two_pi * y / *spec.lm_wavelength),
           y, 1.0});
      break;
    case Pattern::TwoPoint: {
      const double half = *spec.two_point_offset / 2.0;
      frame.foci.push_back({-half, y, 1.0});
      frame.foci.push_back({half, y, 1.0});
      break;
    }
  }
  return frame;
}

std::vector<FocusFrame> generate_trajectory(const StimulusSpec& spec,
                                            StrokeRepeat repeat) {
  validate(spec);
  const auto count =
      static_cast<std::size_t>(std::llround(spec.duration * spec.update_rate));
  std::vector<FocusFrame> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // k / rate rather than k * dt keeps whole-second frames exact.
    frames.push_back(focus_frame_at(
        spec, static_cast<double>(k) / spec.update_rate, repeat));
  }
  return frames;
}

std::string catalog_to_csv(const std::vector<StimulusSpec>& catalog) {
  std::ostringstream os;
  os << "id,pattern,speed_mm_s,am_hz,lambda_mm,d_mm,offset_mm,duration_s\n";
  for (const auto& s : catalog) {
    os << s.id << ',' << to_string(s.pattern) << ',' << s.speed << ',';
    write_optional(os, s.am_frequency);
    os << ',';
    write_optional(os, s.lm_wavelength);
    os << ',';
    write_optional(os, s.lm_displacement);
    os << ',';
    write_optional(os, s.two_point_offset);
    os << ',' << s.duration << '\n';
  }
  return os.str();
}

std::string catalog_to_json(const std::vector<StimulusSpec>& catalog) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : catalog) {
    out.push_back({{"id", s.id},
                   {"pattern", std::string(to_string(s.pattern))},
                   {"speed_mm_s", s.speed},
                   {"am_hz", optional_json(s.am_frequency)},
                   {"lambda_mm", optional_json(s.lm_wavelength)},
                   {"d_mm", optional_json(s.lm_displacement)},
                   {"offset_mm", optional_json(s.two_point_offset)},
                   {"duration_s", s.duration},
                   {"path_length_mm", s.path_length},
                   {"update_rate_hz", s.update_rate},
                   {"description", describe(s)}});
  }
  return out.dump(2);
}

std::vector<StimulusSpec> catalog_from_json(const std::string& text) {
  std::vector<StimulusSpec> catalog;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& item : j) {
      StimulusSpec s;
      s.id = item.at("id").get<int>();
      s.pattern = parse_pattern(item.at("pattern").get<std::string>());
      s.speed = item.at("speed_mm_s").get<double>();
      s.am_frequency = optional_from(item, "am_hz");
      s.lm_wavelength = optional_from(item, "lambda_mm");
      s.lm_displacement = optional_from(item, "d_mm");
      s.two_point_offset = optional_from(item, "offset_mm");
      s.duration = item.value("duration_s", 3.0);
      s.path_length = item.value("path_length_mm", 150.0);
      s.update_rate = item.value("update_rate_hz", 1000.0);
      validate(s);
      catalog.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed catalog: ") + e.what());
  }
  return catalog;
}

std::string trajectory_to_csv(const std::vector<FocusFrame>& frames) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "t_s,focus_index,x_mm,y_mm,amplitude\n";
  for (const auto& frame : frames) {
    for (std::size_t i = 0; i < frame.foci.size(); ++i) {
      const auto& f = frame.foci[i];
      os << frame.t << ',' << i << ',' << f.x << ',' << f.y << ','
         << f.amplitude << '\n';
    }
  }
  return os.str();
}

std::string describe(const StimulusSpec& spec) {
  std::ostringstream os;
  switch (spec.pattern) {
    case Pattern::Static:
      os << "static pressure";
      break;
    case Pattern::AM:
      os << *spec.am_frequency << " Hz amplitude modulation";
      break;
    case Pattern::LMLow:
    case Pattern::LMHigh:
      os << "lateral modulation (lambda " << *spec.lm_wavelength << " mm, "
         << lm_vibration_frequency(spec.speed, *spec.lm_wavelength) << " Hz)";
      break;
    case Pattern::TwoPoint:
      os << "two foci " << *spec.two_point_offset << " mm apart";
      break;
  }
  os << ", " << spec.speed << " mm/s";
  return os.str();
}

}  // namespace elicit
