#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

enum class Pattern { Static, AM, LMLow, LMHigh, TwoPoint };

std::string_view to_string(Pattern pattern);
Pattern parse_pattern(std::string_view text);

/// What happens when the focus reaches the end of the stroke before the
/// trial ends.
enum class StrokeRepeat { Wrap, Clamp };

/// One stimulus condition. Lengths are mm, speeds mm/s, times s, rates Hz.
struct StimulusSpec {
  int id = 0;
  Pattern pattern = Pattern::Static;
  double speed = 0.0;
  std::optional<double> am_frequency;
  std::optional<double> lm_wavelength;
  std::optional<double> lm_displacement;
  std::optional<double> two_point_offset;
  double duration = 3.0;
  double path_length = 150.0;
  double update_rate = 1000.0;

  bool operator==(const StimulusSpec&) const = default;
};

struct Focus {
  double x = 0.0;
  double y = 0.0;
  double amplitude = 1.0;
};

struct FocusFrame {
  double t = 0.0;
  std::vector<Focus> foci;
};

inline constexpr double kAmFrequencyHz = 200.0;
inline constexpr double kLmLowWavelengthMm = 15.0;
inline constexpr double kLmHighWavelengthMm = 1.5;
inline constexpr double kLmDisplacementMm = 5.0;
inline constexpr double kTwoPointOffsetMm = 5.0;
inline constexpr double kSpeedsMmPerS[] = {50.0, 100.0, 300.0};
inline constexpr int kCatalogSize = 15;

/// The 15 conditions, ids assigned pattern-major then speed-minor:
/// Static(0-2), AM(3-5), LMLow(6-8), LMHigh(9-11), TwoPoint(12-14), each
/// at 50, 100, 300 mm/s.
std::vector<StimulusSpec> default_catalog();

/// Builds a spec for one (pattern, speed) with the pattern's fixed constants.
StimulusSpec make_stimulus(int id, Pattern pattern, double speed);

/// Throws ContractError when pattern-specific fields are missing or present
/// on the wrong pattern.
void validate(const StimulusSpec& spec);

/// Spatial vibration frequency of a laterally modulated focus, v / lambda.
double lm_vibration_frequency(double speed, double wavelength);

/// Focus positions at time t (s) from trial start. Not restricted to the
/// sampling grid.
FocusFrame focus_frame_at(const StimulusSpec& spec, double t,
                          StrokeRepeat repeat = StrokeRepeat::Wrap);

/// Samples the focus path at update_rate for the full trial.
std::vector<FocusFrame> generate_trajectory(
    const StimulusSpec& spec, StrokeRepeat repeat = StrokeRepeat::Wrap);

std::string catalog_to_csv(const std::vector<StimulusSpec>& catalog);
std::string catalog_to_json(const std::vector<StimulusSpec>& catalog);
std::vector<StimulusSpec> catalog_from_json(const std::string& text);

/// Rows: t_s,focus_index,x_mm,y_mm,amplitude
std::string trajectory_to_csv(const std::vector<FocusFrame>& frames);

std::string describe(const StimulusSpec& spec);

}  // namespace elicit
