#include "macp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "macp/adapter_io.hpp"
#include "macp/dct.hpp"
#include "macp/errors.hpp"
#include "macp/partition.hpp"
#include "macp/resource_model.hpp"
#include "macp/selection.hpp"
#include "macp/spectral_adapter.hpp"
#include "macp/synth_bench.hpp"

namespace macp {

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void emit(std::ostream& out, const GlobalFlags& g, const Json& doc,
          const std::vector<std::string>& csv_columns, const std::vector<Json>& csv_rows) {
  if (g.format == "json") {
    out << doc.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < csv_columns.size(); ++i) out << (i ? "," : "") << csv_columns[i];
  out << '\n';
  for (const auto& row : csv_rows) {
    for (std::size_t i = 0; i < csv_columns.size(); ++i) {
      const auto& v = row.at(csv_columns[i]);
      out << (i ? "," : "");
      if (v.is_string()) {
        out << v.get<std::string>();
      } else if (v.is_number_float()) {
        out << format_double(v.get<double>());
      } else if (v.is_null()) {
        out << "nan";
      } else {
        out << v.dump();
      }
    }
    out << '\n';
  }
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeFlags {
  std::string weights;
  std::string scheme = "three_band";
};

int cmd_analyze(const AnalyzeFlags& f, const GlobalFlags& g, std::ostream& out) {
  const auto weights = read_matrix(f.weights).matrix;
  const auto mask = build_partition(weights.rows(), weights.cols(), parse_scheme(f.scheme));
  const auto energy = energy_map(dct2(weights));
  const auto sizes = band_sizes(mask);
  std::vector<double> band_energy(mask.band_count(), 0.0);
  for (std::size_t u = 0; u < mask.rows(); ++u) {
    for (std::size_t v = 0; v < mask.cols(); ++v) band_energy[mask.band(u, v)] += energy(u, v);
  }
  double total = 0.0;
  for (double e : band_energy) total += e;

  Json doc;
  doc["shape"] = {weights.rows(), weights.cols()};
  doc["scheme"] = f.scheme;
  doc["d_max"] = mask.d_max();
  doc["total_energy"] = total;
  std::vector<Json> rows;
  for (std::size_t k = 0; k < band_energy.size(); ++k) {
    // An all-zero matrix has no energy to share; report zero shares.
    const double share = total > 0.0 ? band_energy[k] / total : 0.0;
    rows.push_back({{"band", k}, {"size", sizes[k]}, {"energy", band_energy[k]}, {"share", share}});
  }
  doc["bands"] = rows;
  emit(out, g, doc, {"band", "size", "energy", "share"}, rows);
  return kExitOk;
}

// --- select ----------------------------------------------------------------

struct SelectFlags {
  std::string weights;
  std::size_t n = 90;
  double delta = 0.7;
  double alpha = 1.0;
  std::string scheme = "three_band";
};

int cmd_select(const SelectFlags& f, const GlobalFlags& g, std::ostream& out) {
  if (g.out.empty()) throw InvalidArgument("select requires --out");
  const auto weights = read_matrix(f.weights).matrix;
  const auto state = init_adapter(weights, parse_scheme(f.scheme), f.n, f.delta, f.alpha, g.seed,
                                  CoeffInit::kZero);
  write_checkpoint(g.out, state);
  const auto mask = build_partition(weights.rows(), weights.cols(), state.plan.scheme);
  Json doc;
  doc["checkpoint"] = g.out;
  doc["n"] = state.plan.size();
  doc["budgets"] = allocate_budgets(f.n, mask);
  emit(out, g, doc, {"checkpoint", "n"}, {doc});
  return kExitOk;
}

// --- train -----------------------------------------------------------------

struct TrainFlags {
  std::string method = "all";
  std::size_t n = 90;
  std::size_t n_random = 128;
  std::size_t rank = 1;
  std::size_t epochs = 2000;
  double lr = 1e-3;
  double delta = 0.7;
  double alpha = 1.0;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t threads = 0;
};

Json summary_json(const std::vector<MethodSummary>& summary) {
  Json arr = Json::array();
  for (const auto& s : summary) {
    arr.push_back({{"method", s.method},
                   {"trainable_params", s.trainable_params},
                   {"runs", s.runs},
                   {"failures", s.failures},
                   {"median_final_acc", number_or_null(s.median_final_acc)},
                   {"median_epochs_to_95", number_or_null(s.median_epochs_to_threshold)}});
  }
  return arr;
}

int cmd_train(const TrainFlags& f, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  Fig3Config cfg;
  cfg.n_macp = f.n;
  cfg.n_random = f.n_random;
  cfg.rank = f.rank;
  cfg.delta = f.delta;
  cfg.alpha = f.alpha;
  cfg.train.epochs = f.epochs;
  cfg.train.lr = f.lr;
  cfg.threads = f.threads;
  if (f.method != "all") cfg.methods = {parse_method(f.method)};

  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  fs::create_directories(dir);
  err << "training " << cfg.methods.size() << " method(s) x " << f.seeds.size() << " seed(s), "
      << f.epochs << " epochs\n";
  const auto result = run_fig3(f.seeds, cfg);

  std::ostringstream csv;
  write_fig3_csv(csv, result.runs);
  write_file_atomic(dir / "fig3_runs.csv", csv.str());

  Json failures = Json::array();
  for (const auto& run : result.runs) {
    if (run.record.failed) {
      failures.push_back({{"seed", run.seed}, {"method", run.record.method}, {"error", run.record.failure}});
    }
  }
  Json doc;
  doc["epochs"] = f.epochs;
  doc["lr"] = f.lr;
  doc["seeds"] = f.seeds;
  doc["summary"] = summary_json(result.summary);
  doc["failed_runs"] = failures;
  write_file_atomic(dir / "fig3_summary.json", doc.dump(2) + "\n");

  std::vector<Json> rows;
  for (const auto& r : doc["summary"]) rows.push_back(r);
  emit(out, g, doc,
       {"method", "trainable_params", "runs", "failures", "median_final_acc", "median_epochs_to_95"},
       rows);
  return kExitOk;
}

// --- ablate ----------------------------------------------------------------

struct AblateFlags {
  std::vector<std::string> schemes{"low_only", "low_high", "three_band", "four_band"};
  std::size_t n = 90;
  std::size_t epochs = 2000;
  double lr = 1e-3;
  double delta = 0.7;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t threads = 0;
};

int cmd_ablate(const AblateFlags& f, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  std::vector<PartitionScheme> schemes;
  for (const auto& name : f.schemes) schemes.push_back(parse_scheme(name));
  AblationConfig cfg;
  cfg.n = f.n;
  cfg.delta = f.delta;
  cfg.train.epochs = f.epochs;
  cfg.train.lr = f.lr;
  cfg.threads = f.threads;

  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  fs::create_directories(dir);
  err << "ablation over " << schemes.size() << " scheme(s) x " << f.seeds.size() << " seed(s)\n";
  const auto result = run_partition_ablation(schemes, f.seeds, cfg);

  std::ostringstream csv;
  write_ablation_csv(csv, result.rows);
  write_file_atomic(dir / "ablation.csv", csv.str());

  Json summary = Json::array();
  std::vector<Json> rows;
  for (const auto& s : result.summary) {
    Json row = {{"scheme", std::string(scheme_name(s.scheme))},
                {"completed", s.completed},
                {"median_final_acc", s.median_final_acc ? Json(*s.median_final_acc) : Json(nullptr)},
                {"error", s.error}};
    summary.push_back(row);
    rows.push_back(row);
  }
  Json row_errors = Json::array();
  for (const auto& r : result.rows) {
    if (!r.error.empty()) {
      row_errors.push_back({{"scheme", std::string(scheme_name(r.scheme))}, {"seed", r.seed}, {"error", r.error}});
    }
  }
  Json doc;
  doc["n"] = f.n;
  doc["epochs"] = f.epochs;
  doc["seeds"] = f.seeds;
  doc["summary"] = summary;
  doc["row_errors"] = row_errors;
  doc["three_band_ge_low_only"] =
      result.three_band_ge_low_only ? Json(*result.three_band_ge_low_only) : Json(nullptr);
  doc["note"] =
      "scheme ablation run on the synthetic 8-class task in place of the large-model "
      "benchmarks; three_band >= low_only is a directional expectation, not a requirement";
  write_file_atomic(dir / "ablation_summary.json", doc.dump(2) + "\n");
  emit(out, g, doc, {"scheme", "completed", "median_final_acc", "error"}, rows);
  return kExitOk;
}

// --- memory ----------------------------------------------------------------

struct MemoryFlags {
  std::uint64_t batch = 1;
  std::uint64_t seq_len = 2048;
  std::uint64_t hidden = 4096;
  std::uint64_t n = 1000;
  std::uint64_t rank = 32;
};

int cmd_memory(const MemoryFlags& f, const GlobalFlags& g, std::ostream& out) {
  const MemoryQuery q{f.batch, f.seq_len, f.hidden, f.n, f.rank};
  const auto macp = activation_memory_macp(q);
  const auto lora = activation_memory_lowrank(q);
  const double savings = savings_ratio(q);
  Json doc;
  doc["B"] = q.batch;
  doc["S"] = q.seq_len;
  doc["H"] = q.hidden;
  doc["n"] = q.n;
  doc["r"] = q.rank;
  doc["macp"] = macp;
  doc["lora"] = lora;
  doc["savings"] = savings;
  doc["macp_bytes_fp32"] = activation_bytes(macp);
  doc["lora_bytes_fp32"] = activation_bytes(lora);
  if (q.batch == 1 && q.seq_len == 2048 && q.hidden == 4096 && q.n == 1000) {
    doc["note"] =
        "the published figure for this configuration is a 50.01% reduction; the activation "
        "formulas give " + format_double(std::round(savings * 1e5) / 1e3) +
        "%. The low-rank formula has no r term, so r does not affect the result.";
  }
  emit(out, g, doc, {"B", "S", "H", "n", "r", "macp", "lora", "savings"}, {doc});
  return kExitOk;
}

// --- merge -----------------------------------------------------------------

struct MergeFlags {
  std::string weights;
  std::string checkpoint;
};

int cmd_merge(const MergeFlags& f, const GlobalFlags& g, std::ostream& out) {
  if (g.out.empty()) throw InvalidArgument("merge requires --out");
  const auto loaded = read_matrix(f.weights);
  const auto state = read_checkpoint(f.checkpoint);
  const auto merged = merge(state, loaded.matrix);
  write_matrix(g.out, merged, loaded.dtype);
  Json doc;
  doc["out"] = g.out;
  doc["shape"] = {merged.rows(), merged.cols()};
  doc["coefficients"] = state.coeffs.size();
  emit(out, g, doc, {"out", "coefficients"}, {doc});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cosine-spectrum adapters: analysis, selection, training and accounting", "macp"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--format", g.format, "Machine-readable output format")
      ->check(CLI::IsMember({"json", "csv"}));

  const std::vector<std::string> scheme_names{"three_band", "low_only", "low_high", "four_band"};

  AnalyzeFlags analyze;
  auto* sub_analyze = app.add_subcommand("analyze", "Per-band spectral energy of a weight file");
  sub_analyze->add_option("--weights", analyze.weights, "Weight file")->required();
  sub_analyze->add_option("--scheme", analyze.scheme)->check(CLI::IsMember(scheme_names));

  SelectFlags select;
  auto* sub_select = app.add_subcommand("select", "Write a zero-initialized adapter checkpoint");
  sub_select->add_option("--weights", select.weights, "Base weight file")->required();
  sub_select->add_option("--n", select.n, "Number of coefficients");
  sub_select->add_option("--delta", select.delta, "Energy-ranked fraction")->check(CLI::Range(0.0, 1.0));
  sub_select->add_option("--alpha", select.alpha, "Scale");
  sub_select->add_option("--scheme", select.scheme)->check(CLI::IsMember(scheme_names));

  TrainFlags train;
  auto* sub_train = app.add_subcommand("train", "Synthetic 8-class comparison of adapters");
  sub_train->add_option("--method", train.method)
      ->check(CLI::IsMember({"all", "macp", "lowrank", "random_spectral"}));
  sub_train->add_option("--n", train.n, "Coefficients for macp");
  sub_train->add_option("--n-random", train.n_random, "Coefficients for random_spectral");
  sub_train->add_option("--rank", train.rank, "Rank for lowrank")->check(CLI::PositiveNumber);
  sub_train->add_option("--epochs", train.epochs)->check(CLI::PositiveNumber);
  sub_train->add_option("--lr", train.lr)->check(CLI::NonNegativeNumber);
  sub_train->add_option("--delta", train.delta)->check(CLI::Range(0.0, 1.0));
  sub_train->add_option("--alpha", train.alpha);
  sub_train->add_option("--seeds", train.seeds, "Comma-separated seeds")->delimiter(',');
  sub_train->add_option("--threads", train.threads, "Worker threads (0 = all cores)");

  AblateFlags ablate;
  auto* sub_ablate = app.add_subcommand("ablate", "Partition-scheme ablation at fixed n");
  sub_ablate->add_option("--schemes", ablate.schemes)->delimiter(',')->check(CLI::IsMember(scheme_names));
  sub_ablate->add_option("--n", ablate.n);
  sub_ablate->add_option("--epochs", ablate.epochs)->check(CLI::PositiveNumber);
  sub_ablate->add_option("--lr", ablate.lr)->check(CLI::NonNegativeNumber);
  sub_ablate->add_option("--delta", ablate.delta)->check(CLI::Range(0.0, 1.0));
  sub_ablate->add_option("--seeds", ablate.seeds)->delimiter(',');
  sub_ablate->add_option("--threads", ablate.threads);

  MemoryFlags memory;
  auto* sub_memory = app.add_subcommand("memory", "Activation-memory model");
  sub_memory->add_option("--B", memory.batch, "Batch size")->check(CLI::PositiveNumber);
  sub_memory->add_option("--S", memory.seq_len, "Sequence length")->check(CLI::PositiveNumber);
  sub_memory->add_option("--H", memory.hidden, "Embedding dimension")->check(CLI::PositiveNumber);
  sub_memory->add_option("--n", memory.n, "Selected coefficients");
  sub_memory->add_option("--r", memory.rank, "Low-rank rank (reported only)");

  MergeFlags mergef;
  auto* sub_merge = app.add_subcommand("merge", "Fold an adapter into its base weights");
  sub_merge->add_option("--weights", mergef.weights)->required();
  sub_merge->add_option("--checkpoint", mergef.checkpoint)->required();

  // CLI11 wants argv-style input in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    err << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    err << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sub_analyze->parsed()) return cmd_analyze(analyze, g, out);
    if (sub_select->parsed()) return cmd_select(select, g, out);
    if (sub_train->parsed()) return cmd_train(train, g, out, err);
    if (sub_ablate->parsed()) return cmd_ablate(ablate, g, out, err);
    if (sub_memory->parsed()) return cmd_memory(memory, g, out);
    if (sub_merge->parsed()) return cmd_merge(mergef, g, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace macp
