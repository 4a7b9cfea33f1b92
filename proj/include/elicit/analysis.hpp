#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

enum class CorrelationKind { Pearson, Spearman };

struct ParticipantResult {
  std::string participant_id;
  /// Pre-evaluation ratings indexed by stimulus id.
  std::vector<double> before;
  /// Normalized strengths indexed by stimulus id.
  std::vector<double> after;
  double r = 0.0;
  double mad = 0.0;
};

/// Pearson product-moment correlation. Throws UndefinedCorrelationError for a
/// constant input.
double pearson_r(std::span<const double> before, std::span<const double> after);

/// Pearson correlation of mid-ranks.
double spearman_rho(std::span<const double> before,
                    std::span<const double> after);

double mean_absolute_difference(std::span<const double> before,
                                std::span<const double> after);

/// Mid-ranks (1-based, ties averaged).
std::vector<double> average_ranks(std::span<const double> values);

ParticipantResult make_participant_result(
    std::string participant_id, std::vector<double> before,
    std::vector<double> after,
    CorrelationKind kind = CorrelationKind::Pearson);

struct StimulusStats {
  double mean = 0.0;
  /// Sample standard deviation; absent with a single participant.
  std::optional<double> sd;
};

std::vector<StimulusStats> aggregate_stats(
    std::span<const ParticipantResult> results);

/// Min, quartiles (linear interpolation between order statistics) and max.
struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumberSummary five_number_summary(std::span<const double> values);

enum class ReportFormat { Csv, Json };

ReportFormat parse_report_format(std::string_view text);

/// Rendered report files keyed by file name.
struct Report {
  std::map<std::string, std::string> files;

  void write_to(const std::string& directory) const;
};

/// Paired before/after series, per-participant r and MAD, the MAD box-plot
/// summary and the per-stimulus mean/sd table.
Report report(std::span<const ParticipantResult> results, ReportFormat format);

}  // namespace elicit
