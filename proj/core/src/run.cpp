#include "aclora/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "aclora/analysis.hpp"

namespace aclora {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

std::string join_retained(const std::vector<int>& retained) {
  std::string out;
  for (std::size_t i = 0; i < retained.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(retained[i]);
  }
  return out;
}

// Minimal polyline chart; one series per (label, values) pair.
void write_svg(const fs::path& path,
               const std::vector<std::pair<std::string, std::vector<double>>>&
                   series,
               const std::string& title) {
  const int width = 640, height = 400, margin = 48;
  double lo = 0.0, hi = 1e-300;
  std::size_t n = 1;
  for (const auto& [label, values] : series) {
    for (double v : values) hi = std::max(hi, v);
    n = std::max(n, values.size());
  }
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title
      << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& values = series[s].second;
    if (values.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << colors[s % 4]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double x =
          margin + (width - 2.0 * margin) * (n > 1 ? i / double(n - 1) : 0.5);
      const double y = height - margin -
                       (height - 2.0 * margin) * (values[i] - lo) / (hi - lo);
      out << fmt(x) << "," << fmt(y) << " ";
    }
    out << "\"/>\n";
    out << "<text x=\"" << width - margin - 140 << "\" y=\""
        << 20 + 16 * (s + 1) << "\" font-size=\"12\" fill=\"" << colors[s % 4]
        << "\">" << series[s].first << "</text>\n";
  }
  out << "</svg>\n";
}

nlohmann::json matrix_to_json(const Matrix& m) {
  // Row-major flat dump.
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows.push_back(m(i, j));
  }
  return rows;
}

nlohmann::json restart_to_json(const RestartReport& report) {
  nlohmann::json j;
  j["epoch"] = report.epoch;
  j["p"] = report.threshold;
  j["alpha"] = report.alpha;
  j["per_layer"] = nlohmann::json::array();
  for (const auto& layer : report.per_layer) {
    j["per_layer"].push_back({{"layer", layer.layer_id},
                              {"I", layer.retained},
                              {"sigma", layer.sigma},
                              {"pre_spectrum", layer.pre_spectrum},
                              {"post_spectrum", layer.post_spectrum}});
  }
  return j;
}

struct RunResult {
  RunConfig config;
  SyntheticTask task;
  TrainRecord record;
  double final_eval = 0.0;
  int final_retained = 0;
  double recovery = 0.0;
};

RunResult execute(RunConfig config) {
  RunResult result;
  result.config = config;
  result.task = config.task.build();
  result.record = train(result.task, config.train);

  Rng eval_rng = Rng(config.train.seed).fork(0xE7A1);
  result.final_eval =
      evaluate(result.record.adapters.layers[0], result.task, 10000, eval_rng);
  result.final_retained = result.record.restarts.empty()
                              ? config.train.max_rank
                              : result.record.restarts.back()
                                    .per_layer.front()
                                    .retained;
  result.recovery = recovery_error(
      effective_update(result.record.adapters.layers[0]),
      result.task.true_update);
  return result;
}

void write_run_outputs(const RunResult& result, const fs::path& dir) {
  fs::create_directories(dir);

  // Per-epoch CSV. p and alpha are blank on epochs without a restart.
  {
    std::ofstream out(dir / "epochs.csv");
    out << "epoch,train_loss,eval_loss,p,alpha,I\n";
    for (const auto& e : result.record.epochs) {
      out << e.epoch << "," << fmt(e.train_loss) << "," << fmt(e.eval_loss)
          << "," << (std::isnan(e.p) ? "" : fmt(e.p)) << ","
          << (std::isnan(e.alpha) ? "" : fmt(e.alpha)) << ","
          << join_retained(e.retained) << "\n";
    }
  }

  // One row per layer per restart.
  {
    std::ofstream out(dir / "restarts.csv");
    out << "epoch,layer,I,sigma,spectrum_json\n";
    for (const auto& report : result.record.restarts) {
      for (const auto& layer : report.per_layer) {
        nlohmann::json spectra = {{"pre", layer.pre_spectrum},
                                  {"post", layer.post_spectrum}};
        out << report.epoch << "," << layer.layer_id << "," << layer.retained
            << "," << fmt(layer.sigma) << "," << csv_quote(spectra.dump())
            << "\n";
      }
    }
  }

  {
    nlohmann::json summary;
    summary["config"] = to_json(result.config);
    summary["final_train_loss"] = result.record.epochs.back().train_loss;
    summary["final_eval_loss"] = result.final_eval;
    summary["final_retained"] = result.final_retained;
    summary["recovery_error"] = result.recovery;
    summary["restart_count"] = result.record.restarts.size();
    summary["restarts"] = nlohmann::json::array();
    for (const auto& r : result.record.restarts) {
      summary["restarts"].push_back(restart_to_json(r));
    }
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << "\n";
  }

  // Adapter dump: row-major matrices under documented key names.
  {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : result.record.adapters.layers) {
      j["layers"].push_back({{"d", layer.out_dim()},
                             {"k", layer.in_dim()},
                             {"max_rank", layer.max_rank},
                             {"base", matrix_to_json(layer.base)},
                             {"up", matrix_to_json(layer.up)},
                             {"down", matrix_to_json(layer.down)}});
    }
    std::ofstream out(dir / "adapter.json");
    out << j.dump() << "\n";
  }

  if (result.config.output.emit_plots) {
    std::vector<double> train_losses, eval_losses, retained;
    for (const auto& e : result.record.epochs) {
      train_losses.push_back(e.train_loss);
      eval_losses.push_back(e.eval_loss);
      retained.push_back(e.retained.empty() ? 0 : e.retained[0]);
    }
    write_svg(dir / "loss.svg",
              {{"train", train_losses}, {"eval", eval_losses}}, "loss");
    write_svg(dir / "retained.svg", {{"I", retained}}, "retained count");
    if (!result.record.restarts.empty()) {
      std::vector<std::pair<std::string, std::vector<double>>> spectra;
      const auto& last = result.record.restarts.back();
      for (const auto& layer : last.per_layer) {
        spectra.emplace_back(layer.layer_id, layer.post_spectrum);
      }
      write_svg(dir / "spectrum.svg", spectra, "final spectrum");
    }
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double iqr(std::vector<double> v) {
  if (v.size() < 2) return 0.0;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - lo;
    return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
  };
  return quantile(0.75) - quantile(0.25);
}

}  // namespace

std::string resolve_output_dir(const std::string& dir) {
  if (!fs::path(dir).is_absolute()) {
    if (const char* root = std::getenv("ACLORA_OUTPUT_ROOT")) {
      return (fs::path(root) / dir).string();
    }
  }
  return dir;
}

int cmd_run(const std::string& config_path,
            const std::vector<std::string>& overrides) {
  RunConfig config;
  try {
    config = load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  }

  RunResult result;
  try {
    result = execute(config);
  } catch (const TrainingDivergence& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitDiverged;
  }

  const fs::path dir = resolve_output_dir(config.output.dir);
  write_run_outputs(result, dir);
  std::cerr << "run complete in " << fmt(result.record.duration_seconds)
            << "s; outputs in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::uint64_t>& seeds, int jobs,
              const std::vector<std::string>& overrides) {
  if (seeds.empty()) {
    std::cerr << "config error: sweep needs at least one seed\n";
    return kExitBadConfig;
  }
  RunConfig base;
  try {
    base = load_config(config_path);
    for (const auto& o : overrides) apply_override(base, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  }

  struct SweepRow {
    std::uint64_t seed;
    TrainMode mode;
    double final_eval = 0.0;
    int final_retained = 0;
    double recovery = 0.0;
    bool ok = false;
    std::string error;
  };
  const TrainMode modes[] = {TrainMode::ac_lora, TrainMode::fixed_rank_baseline};
  std::vector<SweepRow> rows(seeds.size() * 2);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= rows.size()) return;
      const std::uint64_t seed = seeds[idx / 2];
      const TrainMode mode = modes[idx % 2];
      RunConfig config = base;
      config.task.seed = seed;
      config.train.seed = seed;
      config.train.mode = mode;
      SweepRow row;
      row.seed = seed;
      row.mode = mode;
      try {
        RunResult result = execute(config);
        row.final_eval = result.final_eval;
        row.final_retained = result.final_retained;
        row.recovery = result.recovery;
        row.ok = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows[idx] = std::move(row);
    }
  };
  const int n_jobs = std::max(1, std::min<int>(jobs, rows.size()));
  std::vector<std::thread> pool;
  for (int t = 0; t < n_jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  const fs::path dir = resolve_output_dir(base.output.dir);
  fs::create_directories(dir);
  std::ofstream out(dir / "sweep.csv");
  out << "seed,mode,final_eval,final_I,recovery_error,final_eval_iqr,"
         "recovery_error_iqr\n";
  bool all_ok = true;
  for (const auto& row : rows) {
    const char* mode_name =
        row.mode == TrainMode::ac_lora ? "ac_lora" : "fixed_rank_baseline";
    if (row.ok) {
      out << row.seed << "," << mode_name << "," << fmt(row.final_eval) << ","
          << row.final_retained << "," << fmt(row.recovery) << ",,\n";
    } else {
      out << row.seed << "," << mode_name << ",error,,,,\n";
      std::cerr << "seed " << row.seed << " " << mode_name
                << " failed: " << row.error << "\n";
      all_ok = false;
    }
  }
  for (TrainMode mode : modes) {
    std::vector<double> evals, retained, recoveries;
    for (const auto& row : rows) {
      if (row.ok && row.mode == mode) {
        evals.push_back(row.final_eval);
        retained.push_back(row.final_retained);
        recoveries.push_back(row.recovery);
      }
    }
    if (evals.empty()) continue;
    const char* mode_name =
        mode == TrainMode::ac_lora ? "ac_lora" : "fixed_rank_baseline";
    out << "median," << mode_name << "," << fmt(median(evals)) << ","
        << fmt(median(retained)) << "," << fmt(median(recoveries)) << ","
        << fmt(iqr(evals)) << "," << fmt(iqr(recoveries)) << "\n";
  }
  return all_ok ? kExitOk : kExitDiverged;
}

int cmd_theory(const std::vector<int>& dims, const std::vector<int>& samples,
               int trials, std::uint64_t seed, const std::string& out_dir) {
  if (dims.empty() || samples.empty() || trials < 1) {
    std::cerr << "config error: theory needs non-empty dims/samples and "
                 "trials >= 1\n";
    return kExitBadConfig;
  }
  const fs::path dir = resolve_output_dir(out_dir);
  fs::create_directories(dir);

  std::ofstream csv(dir / "theory.csv");
  csv << "R,lambda,trial,ratio\n";
  nlohmann::json summary = nlohmann::json::array();
  std::uint64_t cell = 0;
  for (int r : dims) {
    for (int lambda : samples) {
      SphereExperiment exp{r, lambda, trials, seed + cell++};
      const SphereSummary s = sphere_ratio_experiment(exp);
      for (int t = 0; t < trials; ++t) {
        csv << r << "," << lambda << "," << t << "," << fmt(s.ratios[t])
            << "\n";
      }
      const double predicted =
          std::sqrt(1.0 / (double(r) * lambda)) * chi_mean(r);
      summary.push_back({{"R", r},
                         {"lambda", lambda},
                         {"mean", s.mean_ratio},
                         {"std", s.std_ratio},
                         {"median", s.median_ratio},
                         {"predicted_mean", predicted}});
    }
  }
  std::ofstream js(dir / "theory_summary.json");
  js << summary.dump(2) << "\n";
  return kExitOk;
}

}  // namespace aclora
