#include <httplib.h>

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "elicit/analysis.hpp"
#include "elicit/bt.hpp"
#include "elicit/config.hpp"
#include "elicit/csv.hpp"
#include "elicit/errors.hpp"
#include "elicit/presenter.hpp"
#include "elicit/protocol.hpp"
#include "elicit/service.hpp"
#include "elicit/simulation.hpp"
#include "elicit/stimulus.hpp"

namespace fs = std::filesystem;
using namespace elicit;

namespace {

httplib::Server* g_server = nullptr;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw ContractError("cannot write " + path);
}

AppConfig base_config(const std::string& config_path) {
  AppConfig config = config_path.empty() ? AppConfig{} : load_config(config_path);
  apply_env_overrides(config);
  return config;
}

std::vector<int> parse_repeats(const std::string& text) {
  std::vector<int> out;
  const auto rows = csv::parse(text);
  if (rows.size() != 1) throw ConfigError("--repeats expects e.g. 2,1");
  for (const auto& item : rows.front()) out.push_back(csv::to_int(item));
  return out;
}

// Long-format file: participant_id,stimulus_id,value
std::map<std::string, std::vector<double>> read_long_series(const std::string& path) {
  const auto rows = csv::parse(read_file(path));
  if (rows.empty()) throw ContractError(path + ": missing header");
  csv::expect_header(rows.front(), {"participant_id", "stimulus_id", "value"});
  std::map<std::string, std::map<int, double>> by_participant;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw ContractError(path + ": rows need 3 fields");
    by_participant[rows[r][0]][csv::to_int(rows[r][1])] = csv::to_double(rows[r][2]);
  }
  std::map<std::string, std::vector<double>> out;
  for (const auto& [id, values] : by_participant) {
    std::vector<double> series;
    int expected = 0;
    for (const auto& [stimulus, value] : values) {
      if (stimulus != expected++) {
        throw ContractError(path + ": participant " + id +
                            " must cover stimulus ids 0..n-1");
      }
      series.push_back(value);
    }
    out[id] = std::move(series);
  }
  return out;
}

int run_serve(const std::string& config_path, int port, const std::string& data_dir,
              const std::string& presenter, const std::string& token,
              const std::string& bind) {
  AppConfig config = base_config(config_path);
  if (port >= 0) config.service.port = port;
  if (!data_dir.empty()) config.service.data_dir = data_dir;
  if (!presenter.empty()) config.presenter.sink = parse_sink_kind(presenter);
  if (!token.empty()) config.service.experimenter_token = token;
  if (!bind.empty()) config.service.bind_address = bind;

  SessionService service(config, make_sink(config.presenter));
  const auto restored = service.load_existing();
  httplib::Server server;
  mount_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server != nullptr) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server != nullptr) g_server->stop();
  });
  std::cerr << "[serve] restored " << restored << " session(s); listening on "
            << config.service.bind_address << ':' << config.service.port
            << " (presenter " << to_string(config.presenter.sink) << ")\n";
  if (!server.listen(config.service.bind_address, config.service.port)) {
    std::cerr << "[serve] cannot listen on port " << config.service.port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid rating + pairwise-comparison preference elicitation"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the session HTTP service");
  std::string serve_config, serve_data_dir, serve_presenter, serve_token, serve_bind;
  int serve_port = -1;
  serve->add_option("--config", serve_config, "INI config file");
  serve->add_option("--port", serve_port, "Listen port");
  serve->add_option("--data-dir", serve_data_dir, "Session log directory");
  serve->add_option("--presenter", serve_presenter, "log | file | stream")
      ->check(CLI::IsMember({"log", "file", "stream"}));
  serve->add_option("--token", serve_token, "Experimenter bearer token");
  serve->add_option("--bind", serve_bind, "Bind address");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run synthetic participants end to end");
  int sim_participants = 10;
  double sim_noise = 0.2, sim_temperature = 0.25, sim_spread = 1.0;
  std::uint64_t sim_seed = 1;
  bool sim_deterministic = false;
  std::string sim_out = "simulation", sim_format = "csv", sim_config;
  simulate->add_option("--participants", sim_participants, "Number of sessions")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--noise", sim_noise, "Rating perception noise sd");
  simulate->add_option("--temperature", sim_temperature, "Choice temperature");
  simulate->add_option("--spread", sim_spread, "Utilities ~ U(-spread, +spread)");
  simulate->add_option("--seed", sim_seed, "Base seed");
  simulate->add_flag("--deterministic", sim_deterministic,
                     "Higher utility always wins");
  simulate->add_option("--out", sim_out, "Output directory");
  simulate->add_option("--format", sim_format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--config", sim_config, "INI config file");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Dataset CSV -> estimate CSV");
  std::string est_input, est_output, est_config, est_method = "ilsr", est_normalize;
  std::optional<int> est_n_items, est_max_iter;
  std::optional<double> est_alpha, est_tol;
  estimate->add_option("--input", est_input, "winner_id,loser_id,provenance CSV")
      ->required();
  estimate->add_option("--output", est_output, "Output CSV (default stdout)");
  estimate->add_option("--n-items", est_n_items, "Item count");
  estimate->add_option("--alpha", est_alpha, "Pseudo-wins per ordered pair");
  estimate->add_option("--tol", est_tol, "Convergence tolerance");
  estimate->add_option("--max-iter", est_max_iter, "Iteration cap");
  estimate->add_option("--normalize-on", est_normalize, "log | natural")
      ->check(CLI::IsMember({"log", "natural"}));
  estimate->add_option("--method", est_method, "ilsr | mm")
      ->check(CLI::IsMember({"ilsr", "mm"}));
  estimate->add_option("--config", est_config, "INI config file");

  // schedule
  auto* schedule = app.add_subcommand("schedule", "Ratings CSV -> schedule CSV");
  std::string sch_input, sch_output, sch_omitted, sch_repeats, sch_config;
  std::uint64_t sch_seed = 0;
  schedule->add_option("--input", sch_input, "stimulus_id,rating,is_anchor CSV")
      ->required();
  schedule->add_option("--output", sch_output, "Output CSV (default stdout)");
  schedule->add_option("--omitted-output", sch_omitted, "Omitted pairs CSV");
  schedule->add_option("--seed", sch_seed, "Ordering seed");
  schedule->add_option("--repeats", sch_repeats, "Repeats per rating gap, e.g. 2,1");
  schedule->add_option("--config", sch_config, "INI config file");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Before/after CSVs -> report");
  std::string an_before, an_after, an_out = "report", an_format = "csv",
                                   an_correlation = "pearson";
  analyze->add_option("--before", an_before, "participant_id,stimulus_id,value")
      ->required();
  analyze->add_option("--after", an_after, "participant_id,stimulus_id,value")
      ->required();
  analyze->add_option("--out", an_out, "Report directory");
  analyze->add_option("--format", an_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  analyze->add_option("--correlation", an_correlation, "pearson | spearman")
      ->check(CLI::IsMember({"pearson", "spearman"}));

  // catalog / trajectory
  auto* catalog = app.add_subcommand("catalog", "Print the stimulus catalog");
  std::string cat_format = "csv";
  catalog->add_option("--format", cat_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* trajectory = app.add_subcommand("trajectory", "Export one stimulus trajectory");
  int traj_id = 0;
  std::string traj_output, traj_stroke = "wrap";
  trajectory->add_option("--id", traj_id, "Stimulus id")->check(CLI::Range(0, 14));
  trajectory->add_option("--output", traj_output, "Output CSV (default stdout)");
  trajectory->add_option("--stroke", traj_stroke, "wrap | clamp")
      ->check(CLI::IsMember({"wrap", "clamp"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      return run_serve(serve_config, serve_port, serve_data_dir, serve_presenter,
                       serve_token, serve_bind);
    }

    if (*simulate) {
      const AppConfig config = base_config(sim_config);
      SimulationOptions options;
      options.estimator = config.bt;
      options.schedule = config.schedule;
      CohortParams params{sim_spread, sim_noise, sim_temperature, sim_deterministic};
      std::vector<ParticipantResult> results;
      double trials = 0.0, tau = 0.0;
      for (int k = 0; k < sim_participants; ++k) {
        const auto seed = sim_seed + static_cast<std::uint64_t>(k);
        SyntheticParticipant participant(sample_profile(params, seed));
        auto sim = run_session(participant, default_catalog(), seed, options);
        const auto& state = sim.session.state();
        const fs::path dir = fs::path(sim_out) / ("session_" + std::to_string(k));
        fs::create_directories(dir);
        write_output((dir / "events.jsonl").string(), to_jsonl(state.event_log));
        write_output((dir / "ratings.csv").string(), ratings_to_csv(state.ratings));
        write_output((dir / "schedule.csv").string(),
                     schedule_to_csv(state.schedule, state.choices));
        write_output((dir / "dataset.csv").string(), dataset_to_csv(sim.dataset));
        write_output((dir / "estimate.csv").string(),
                     estimate_to_csv(sim.estimate, options.estimator));
        const auto counts = state.schedule.counts();
        const auto metrics = recovery_metrics(participant.profile().utilities,
                                              sim.estimate.normalized_scores);
        trials += counts.total_trials;
        tau += metrics.kendall_tau;
        std::cout << "session " << k << ": trials " << counts.total_trials << " ("
                  << counts.twice << " twice, " << counts.once << " once, "
                  << counts.omitted << " omitted)  r " << sim.result.r << "  mad "
                  << sim.result.mad << "  tau " << metrics.kendall_tau << '\n';
        sim.result.participant_id = "P" + std::to_string(k);
        results.push_back(std::move(sim.result));
      }
      report(results, parse_report_format(sim_format))
          .write_to((fs::path(sim_out) / "report").string());
      double mean_r = 0.0;
      for (const auto& r : results) mean_r += r.r;
      const double n = static_cast<double>(results.size());
      std::cout << "mean trials " << trials / n << "  mean r " << mean_r / n
                << "  mean tau " << tau / n << '\n';
      return 0;
    }

    if (*estimate) {
      AppConfig config = base_config(est_config);
      EstimatorOptions options = config.bt;
      if (est_alpha) options.alpha = *est_alpha;
      if (est_tol) options.tol = *est_tol;
      if (est_max_iter) options.max_iter = *est_max_iter;
      if (!est_normalize.empty()) options.normalize_on = parse_normalize_on(est_normalize);
      const auto dataset = dataset_from_csv(read_file(est_input), est_n_items);
      const auto result = est_method == "mm" ? estimate_mm(dataset, options)
                                             : estimate_ilsr(dataset, options);
      write_output(est_output, estimate_to_csv(result, options));
      if (!result.converged) {
        std::cerr << "warning: did not converge in " << result.iterations
                  << " iterations\n";
      }
      return 0;
    }

    if (*schedule) {
      AppConfig config = base_config(sch_config);
      if (!sch_repeats.empty()) config.schedule.repeats_by_gap = parse_repeats(sch_repeats);
      const auto ratings = ratings_from_csv(read_file(sch_input));
      const auto built = build_schedule(ratings, sch_seed, config.schedule);
      write_output(sch_output, schedule_to_csv(built));
      if (!sch_omitted.empty()) write_output(sch_omitted, omitted_to_csv(built));
      const auto counts = built.counts();
      std::cerr << counts.total_trials << " trials: " << counts.twice << " pairs twice, "
                << counts.once << " once, " << counts.omitted << " omitted\n";
      return 0;
    }

    if (*analyze) {
      const auto before = read_long_series(an_before);
      const auto after = read_long_series(an_after);
      const auto kind = an_correlation == "spearman" ? CorrelationKind::Spearman
                                                     : CorrelationKind::Pearson;
      std::vector<ParticipantResult> results;
      for (const auto& [id, series] : before) {
        const auto it = after.find(id);
        if (it == after.end()) throw ContractError("no after data for " + id);
        results.push_back(make_participant_result(id, series, it->second, kind));
      }
      const auto rendered = report(results, parse_report_format(an_format));
      rendered.write_to(an_out);
      for (const auto& r : results) {
        std::cout << r.participant_id << ": r " << r.r << "  mad " << r.mad << '\n';
      }
      return 0;
    }

    if (*catalog) {
      const auto specs = default_catalog();
      std::cout << (cat_format == "json" ? catalog_to_json(specs) + "\n"
                                         : catalog_to_csv(specs));
      return 0;
    }

    if (*trajectory) {
      const auto spec = default_catalog().at(static_cast<std::size_t>(traj_id));
      const auto repeat = traj_stroke == "clamp" ? StrokeRepeat::Clamp : StrokeRepeat::Wrap;
      write_output(traj_output, trajectory_to_csv(generate_trajectory(spec, repeat)));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
