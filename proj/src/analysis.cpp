#include "elicit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "elicit/csv.hpp"
#include "elicit/errors.hpp"

namespace elicit {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b,
                         std::size_t minimum) {
  if (a.size() != b.size()) {
    throw ContractError("vectors must have equal length");
  }
  if (a.size() < minimum) {
    throw ContractError("need at least " + std::to_string(minimum) + " values");
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double position = q * static_cast<double>(sorted.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const auto upper = std::min(lower + 1, sorted.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return sorted[lower] + fraction * (sorted[upper] - sorted[lower]);
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

double pearson_r(std::span<const double> before, std::span<const double> after) {
  require_same_length(before, after, 2);
  const double mx = mean(before);
  const double my = mean(after);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const double dx = before[i] - mx;
    const double dy = after[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("correlation undefined for a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> before,
                    std::span<const double> after) {
  require_same_length(before, after, 2);
  const auto rx = average_ranks(before);
  const auto ry = average_ranks(after);
  return pearson_r(rx, ry);
}

double mean_absolute_difference(std::span<const double> before,
                                std::span<const double> after) {
  require_same_length(before, after, 1);
  double total = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    total += std::abs(before[i] - after[i]);
  }
  return total / static_cast<double>(before.size());
}

ParticipantResult make_participant_result(std::string participant_id,
                                          std::vector<double> before,
                                          std::vector<double> after,
                                          CorrelationKind kind) {
  ParticipantResult result;
  result.participant_id = std::move(participant_id);
  result.r = kind == CorrelationKind::Pearson ? pearson_r(before, after)
                                              : spearman_rho(before, after);
  result.mad = mean_absolute_difference(before, after);
  result.before = std::move(before);
  result.after = std::move(after);
  return result;
}

std::vector<StimulusStats> aggregate_stats(
    std::span<const ParticipantResult> results) {
  if (results.empty()) throw ContractError("no participant results");
  const auto n = results.front().after.size();
  for (const auto& r : results) {
    if (r.after.size() != n) {
      throw ContractError("participant results are not aligned");
    }
  }
  std::vector<StimulusStats> stats(n);
  const auto count = static_cast<double>(results.size());
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    for (const auto& r : results) sum += r.after[s];
    const double m = sum / count;
    stats[s].mean = m;
    if (results.size() > 1) {
      double ss = 0.0;
      for (const auto& r : results) ss += (r.after[s] - m) * (r.after[s] - m);
      stats[s].sd = std::sqrt(ss / (count - 1.0));
    }
  }
  return stats;
}

FiveNumberSummary five_number_summary(std::span<const double> values) {
  if (values.empty()) throw ContractError("no values to summarize");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {sorted.front(), quantile_sorted(sorted, 0.25),
          quantile_sorted(sorted, 0.5), quantile_sorted(sorted, 0.75),
          sorted.back()};
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  throw ContractError("unknown report format '" + std::string(text) + "'");
}

void Report::write_to(const std::string& directory) const {
  std::filesystem::create_directories(directory);
  for (const auto& [name, content] : files) {
    std::ofstream out(std::filesystem::path(directory) / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write report file " + name);
  }
}

Report report(std::span<const ParticipantResult> results, ReportFormat format) {
  if (results.empty()) throw ContractError("no participant results to report");
  std::vector<double> mads;
  for (const auto& r : results) mads.push_back(r.mad);
  const auto box = five_number_summary(mads);
  const auto stats = aggregate_stats(results);

  Report out;
  if (format == ReportFormat::Json) {
    nlohmann::json participants = nlohmann::json::array();
    for (const auto& r : results) {
      participants.push_back({{"participant_id", r.participant_id},
                              {"r", r.r},
                              {"mad", r.mad},
                              {"before", r.before},
                              {"after", r.after}});
    }
    nlohmann::json per_stimulus = nlohmann::json::array();
    for (std::size_t s = 0; s < stats.size(); ++s) {
      per_stimulus.push_back({{"stimulus_id", s},
                              {"mean", stats[s].mean},
                              {"sd", optional_number(stats[s].sd)}});
    }
    const nlohmann::json doc = {
        {"participants", participants},
        {"mad_box",
         {{"min", box.min},
          {"q1", box.q1},
          {"median", box.median},
          {"q3", box.q3},
          {"max", box.max}}},
        {"stimulus_stats", per_stimulus}};
    out.files["report.json"] = doc.dump(2) + "\n";
    return out;
  }

  std::ostringstream paired;
  paired << "participant_id,stimulus_id,before,after\n";
  std::ostringstream summary;
  summary << "participant_id,r,mad\n";
  for (const auto& r : results) {
    for (std::size_t s = 0; s < r.before.size(); ++s) {
      paired << r.participant_id << ',' << s << ',' << csv::format(r.before[s])
             << ',' << csv::format(r.after[s]) << '\n';
    }
    summary << r.participant_id << ',' << csv::format(r.r) << ','
            << csv::format(r.mad) << '\n';
  }
  std::ostringstream box_csv;
  box_csv << "min,q1,median,q3,max\n"
          << csv::format(box.min) << ',' << csv::format(box.q1) << ','
          << csv::format(box.median) << ',' << csv::format(box.q3) << ','
          << csv::format(box.max) << '\n';
  std::ostringstream stimulus_csv;
  stimulus_csv << "stimulus_id,mean,sd\n";
  for (std::size_t s = 0; s < stats.size(); ++s) {
    stimulus_csv << s << ',' << csv::format(stats[s].mean) << ',';
    if (stats[s].sd) stimulus_csv << csv::format(*stats[s].sd);
    stimulus_csv << '\n';
  }
  out.files["paired_series.csv"] = paired.str();
  out.files["participants.csv"] = summary.str();
  out.files["mad_box.csv"] = box_csv.str();
  out.files["stimulus_stats.csv"] = stimulus_csv.str();
  return out;
}

}  // namespace elicit
