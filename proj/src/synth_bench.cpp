#include "macp/synth_bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "macp/errors.hpp"
#include "macp/rng.hpp"
#include "macp/selection.hpp"

namespace macp {

namespace {

// Runs jobs [0, count) on a small pool. Each job writes only its own slot,
// so results do not depend on scheduling.
void run_parallel(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(FormatErrc::kParse, "invalid number '" + text + "'");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(FormatErrc::kParse, "invalid integer '" + text + "'");
  }
  return value;
}

void expect_header(std::istream& in, const std::string& header) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(FormatErrc::kParse, "expected CSV header '" + header + "'");
  }
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  if (std::isinf(values[mid - 1]) || std::isinf(values[mid])) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

std::array<double, 2> class_center(const SyntheticDatasetConfig& config, std::size_t k) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(config.num_classes);
  return {config.center_radius * std::cos(angle), config.center_radius * std::sin(angle)};
}

Dataset make_dataset(const SyntheticDatasetConfig& config) {
  if (!(config.noise_sigma > 0.0)) throw InvalidArgument("make_dataset: sigma must be positive");
  if (config.samples_per_class < 1) {
    throw InvalidArgument("make_dataset: samples_per_class must be at least 1");
  }
  if (config.num_classes < 1) throw InvalidArgument("make_dataset: need at least one class");
  Dataset data;
  data.num_classes = config.num_classes;
  Rng rng(config.seed, RngStream::kDataset);
  for (std::size_t k = 0; k < config.num_classes; ++k) {
    const auto center = class_center(config, k);
    for (std::size_t i = 0; i < config.samples_per_class; ++i) {
      const double dx = config.noise_sigma * rng.normal();
      const double dy = config.noise_sigma * rng.normal();
      data.points.push_back({center[0] + dx, center[1] + dy});
      data.labels.push_back(k);
    }
  }
  return data;
}

std::vector<MethodSummary> summarize_runs(const std::vector<SeededRun>& runs, double threshold) {
  std::vector<MethodSummary> out;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> stats;
  for (const auto& run : runs) {
    const auto& rec = run.record;
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const MethodSummary& s) { return s.method == rec.method; });
    if (it == out.end()) {
      out.push_back({rec.method, rec.trainable_params, 0, 0, 0.0, 0.0});
      it = out.end() - 1;
    }
    ++it->runs;
    if (rec.failed || rec.epochs.empty()) {
      ++it->failures;
      continue;
    }
    auto& [finals, reach] = stats[rec.method];
    finals.push_back(rec.final_accuracy());
    const auto hit = rec.epochs_to_reach(threshold);
    reach.push_back(hit ? static_cast<double>(*hit) : std::numeric_limits<double>::infinity());
  }
  for (auto& s : out) {
    auto& [finals, reach] = stats[s.method];
    s.median_final_acc = median(finals);
    s.median_epochs_to_threshold = median(reach);
  }
  return out;
}

Fig3Result run_fig3(const std::vector<std::uint64_t>& seeds, const Fig3Config& config) {
  if (seeds.empty()) throw InvalidArgument("run_fig3: at least one seed is required");
  const std::size_t per_seed = config.methods.size();
  Fig3Result result;
  result.runs.resize(seeds.size() * per_seed);

  // One dataset and frozen model per seed, shared by every method.
  std::vector<Dataset> datasets;
  std::vector<ToyModel> models;
  for (auto seed : seeds) {
    auto data_cfg = config.data;
    data_cfg.seed = seed;
    datasets.push_back(make_dataset(data_cfg));
    models.push_back(make_toy_model(seed));
  }

  run_parallel(result.runs.size(), config.threads, [&](std::size_t job) {
    const std::size_t s = job / per_seed;
    MethodConfig mc;
    mc.method = config.methods[job % per_seed];
    mc.delta = config.delta;
    mc.alpha = config.alpha;
    mc.rank = config.rank;
    mc.n = mc.method == Method::kRandomSpectral ? config.n_random : config.n_macp;
    TrainConfig tc = config.train;
    tc.seed = seeds[s];
    SeededRun run{seeds[s], {}};
    try {
      run.record = train(models[s], mc, tc, datasets[s]);
    } catch (const Error& e) {
      run.record.method = std::string(method_name(mc.method));
      run.record.failed = true;
      run.record.failure = e.what();
    }
    result.runs[job] = std::move(run);
  });

  result.summary = summarize_runs(result.runs);
  return result;
}

void write_fig3_csv(std::ostream& out, const std::vector<SeededRun>& runs) {
  out << "seed,method,epoch,loss,train_acc\n";
  for (const auto& run : runs) {
    for (const auto& e : run.record.epochs) {
      out << run.seed << ',' << run.record.method << ',' << e.epoch << ',' << format_double(e.loss)
          << ',' << format_double(e.train_acc) << '\n';
    }
  }
}

std::vector<SeededRun> parse_fig3_csv(std::istream& in) {
  expect_header(in, "seed,method,epoch,loss,train_acc");
  std::vector<SeededRun> runs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw FormatError(FormatErrc::kParse, "fig3 row needs 5 fields: " + line);
    const auto seed = parse_u64(f[0]);
    if (runs.empty() || runs.back().seed != seed || runs.back().record.method != f[1]) {
      runs.push_back({seed, {}});
      runs.back().record.method = f[1];
    }
    auto& rec = runs.back().record;
    EpochLog e;
    e.epoch = parse_u64(f[2]);
    e.loss = parse_double(f[3]);
    e.train_acc = parse_double(f[4]);
    e.best_acc = std::max(e.train_acc, rec.epochs.empty() ? 0.0 : rec.epochs.back().best_acc);
    rec.epochs.push_back(e);
  }
  return runs;
}

AblationResult run_partition_ablation(const std::vector<PartitionScheme>& schemes,
                                      const std::vector<std::uint64_t>& seeds,
                                      const AblationConfig& config) {
  if (schemes.empty() || seeds.empty()) {
    throw InvalidArgument("run_partition_ablation: need at least one scheme and one seed");
  }
  std::vector<Dataset> datasets;
  std::vector<ToyModel> models;
  for (auto seed : seeds) {
    auto data_cfg = config.data;
    data_cfg.seed = seed;
    datasets.push_back(make_dataset(data_cfg));
    models.push_back(make_toy_model(seed));
  }

  AblationResult result;
  result.rows.resize(schemes.size() * seeds.size());
  run_parallel(result.rows.size(), config.threads, [&](std::size_t job) {
    const std::size_t si = job / seeds.size();
    const std::size_t s = job % seeds.size();
    AblationRow row;
    row.scheme = schemes[si];
    row.seed = seeds[s];
    try {
      const auto& base = models[s].hidden_base;
      row.budgets = allocate_budgets(config.n, build_partition(base.rows(), base.cols(), row.scheme));
      MethodConfig mc;
      mc.method = Method::kMacp;
      mc.n = config.n;
      mc.delta = config.delta;
      mc.alpha = config.alpha;
      mc.scheme = row.scheme;
      TrainConfig tc = config.train;
      tc.seed = seeds[s];
      const auto rec = train(models[s], mc, tc, datasets[s]);
      if (rec.failed) {
        row.error = rec.failure;
      } else {
        row.final_acc = rec.final_accuracy();
      }
    } catch (const CapacityError& e) {
      row.error = std::string("capacity error: ") + e.what();
    } catch (const Error& e) {
      row.error = e.what();
    }
    result.rows[job] = std::move(row);
  });

  result.summary = summarize_ablation(result.rows);
  const AblationSchemeSummary* three = nullptr;
  const AblationSchemeSummary* low = nullptr;
  for (const auto& s : result.summary) {
    if (s.scheme == PartitionScheme::kThreeBand) three = &s;
    if (s.scheme == PartitionScheme::kLowOnly) low = &s;
  }
  if (three && low && three->median_final_acc && low->median_final_acc) {
    result.three_band_ge_low_only = *three->median_final_acc >= *low->median_final_acc;
  }
  return result;
}

std::vector<AblationSchemeSummary> summarize_ablation(const std::vector<AblationRow>& rows) {
  std::vector<AblationSchemeSummary> out;
  std::vector<std::vector<double>> finals;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const AblationSchemeSummary& s) { return s.scheme == row.scheme; });
    if (it == out.end()) {
      out.push_back({row.scheme, 0, std::nullopt, {}});
      finals.emplace_back();
      it = out.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - out.begin());
    if (row.final_acc) {
      ++it->completed;
      finals[idx].push_back(*row.final_acc);
    } else if (it->error.empty()) {
      it->error = row.error.empty() ? "run failed" : row.error;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!finals[i].empty()) out[i].median_final_acc = median(finals[i]);
  }
  return out;
}

void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows) {
  out << "scheme,seed,final_acc\n";
  for (const auto& row : rows) {
    out << scheme_name(row.scheme) << ',' << row.seed << ','
        << (row.final_acc ? format_double(*row.final_acc) : std::string("nan")) << '\n';
  }
}

std::vector<AblationRow> parse_ablation_csv(std::istream& in) {
  expect_header(in, "scheme,seed,final_acc");
  std::vector<AblationRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw FormatError(FormatErrc::kParse, "ablation row needs 3 fields: " + line);
    AblationRow row;
    row.scheme = parse_scheme(f[0]);
    row.seed = parse_u64(f[1]);
    const double acc = parse_double(f[2]);
    if (!std::isnan(acc)) row.final_acc = acc;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace macp
