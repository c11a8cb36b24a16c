#include "coldrec/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <set>
#include <stdexcept>

#include "CLI11.hpp"
#include "coldrec/evaluation.hpp"
#include "coldrec/features.hpp"
#include "coldrec/folds.hpp"
#include "coldrec/fusion.hpp"
#include "coldrec/io.hpp"
#include "coldrec/synth.hpp"
#include "coldrec/tuning.hpp"

namespace coldrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

json default_config() {
  return json::parse(R"({
    "seed": 0,
    "out": "run",
    "threads": 0,
    "synth": {"n_users": 2000, "n_items": 500, "n_cold": 100, "feature_dim": 32, "latent_dim": 8,
              "popularity_skew": 1.0, "noise_std": 0.1, "density": 0.05,
              "modalities": 2, "frames_per_item": 4, "frame_noise": 0.05},
    "data": {"interactions": null, "positive_threshold": 5.0, "frames": null, "features": {}, "genres": null},
    "split": {"n_folds": 5, "ratios": [0.6, 0.2, 0.2]},
    "pipeline": {"aggregator": "mean", "ssr": true, "pca": true, "l2": true},
    "fusion": null,
    "model": {"features": "content", "latent_dim": 50, "reg_user": 0.01, "reg_item": 1.0, "reg_proj": 0.01,
              "base_confidence": 0.01, "scaling": 1.0, "scaled": true, "max_sweeps": 50, "patience": 5,
              "init_scale": 0.01, "validation_fraction": 0.1},
    "evaluation": {"cutoffs": [5, 15, 30], "scenario": "cold", "exclude_train_positives": true},
    "tuning": {"lower": 0.2, "upper": 1.4, "budget": 15, "strategy": "bayesian"}
  })");
}

fs::path ExperimentConfig::out() const { return json.at("out").get<std::string>(); }
std::uint64_t ExperimentConfig::seed() const { return json.at("seed").get<std::uint64_t>(); }

ExperimentConfig resolve_config(const std::optional<fs::path>& file, const std::optional<std::uint64_t>& seed,
                                const std::optional<std::string>& out, const std::optional<int>& threads) {
  json config = default_config();
  if (file) {
    json user;
    try {
      user = json::parse(io::read_file(*file));
    } catch (const json::parse_error& e) {
      throw io::FormatError(file->string() + ": " + e.what());
    }
    if (!user.is_object()) throw io::FormatError(file->string() + ": configuration must be a JSON object");
    for (const auto& [key, value] : user.items()) {
      if (!config.contains(key)) throw std::invalid_argument(file->string() + ": unknown section '" + key + "'");
    }
    config.merge_patch(user);
    // merge_patch drops keys set to null; restore the nullable defaults.
    for (const char* key : {"interactions", "frames", "genres"}) {
      if (!config["data"].contains(key)) config["data"][key] = nullptr;
    }
    if (!config.contains("fusion")) config["fusion"] = nullptr;
  }
  if (seed) config["seed"] = *seed;
  if (out) config["out"] = *out;
  if (threads) config["threads"] = *threads;

  const fs::path root = config["out"].get<std::string>();
  auto& data = config["data"];
  if (data["interactions"].is_null()) data["interactions"] = (root / "data" / "interactions.csv").string();
  if (data["genres"].is_null()) data["genres"] = (root / "data" / "genres.csv").string();
  return ExperimentConfig{config};
}

int resolve_threads(const std::optional<int>& flag, const ExperimentConfig& config) {
  if (flag) return *flag;
  if (const char* env = std::getenv("COLDREC_THREADS"); env != nullptr && *env != '\0') {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("COLDREC_THREADS must be an integer, got '" + std::string(env) + "'");
    }
  }
  return config.json.value("threads", 0);
}

namespace {

std::string echo(const ExperimentConfig& config) { return config.json.dump(2) + "\n"; }

std::uint64_t sub_seed(const ExperimentConfig& config, std::string_view stream) {
  return derive_seed(config.seed(), stream);
}

void require_exists(const fs::path& p, std::string_view hint) {
  if (!fs::exists(p)) throw std::runtime_error("missing " + p.string() + " (" + std::string(hint) + ")");
}

CerHyperParams hyper_of(const ExperimentConfig& config) {
  json model = config.json.at("model");
  model.erase("features");
  CerHyperParams h = io::hyper_from_json(model);
  h.seed = sub_seed(config, "init");
  return h;
}

EvaluationConfig evaluation_of(const ExperimentConfig& config) {
  const auto& e = config.json.at("evaluation");
  EvaluationConfig ec;
  ec.cutoffs = e.at("cutoffs").get<std::vector<Index>>();
  ec.scenario = parse_scenario(e.at("scenario").get<std::string>());
  ec.exclude_train_positives = e.at("exclude_train_positives").get<bool>();
  ec.validate();
  return ec;
}

fs::path split_dir(const ExperimentConfig& c) { return c.out() / "split"; }
fs::path features_dir(const ExperimentConfig& c) { return c.out() / "features"; }
fs::path models_dir(const ExperimentConfig& c) { return c.out() / "models"; }

io::LoadedFolds load_split(const ExperimentConfig& config) {
  require_exists(split_dir(config) / "users.csv", "run `split` first");
  return io::read_folds(split_dir(config));
}

// Looks a named feature set up in the run's features/, then the synthetic
// data directory, then the explicit data.features map.
fs::path feature_path(const ExperimentConfig& config, const std::string& name) {
  const auto& explicit_paths = config.json.at("data").at("features");
  if (explicit_paths.contains(name)) return explicit_paths.at(name).get<std::string>();
  for (const fs::path& candidate : {features_dir(config) / (name + ".fmat"),
                                    config.out() / "data" / "features" / (name + ".fmat")}) {
    if (fs::exists(candidate)) return candidate;
  }
  throw std::runtime_error("missing " + (features_dir(config) / (name + ".fmat")).string() +
                           " (run `aggregate`/`fuse`, or list '" + name + "' under data.features)");
}

FeatureMatrix load_named_features(const ExperimentConfig& config, const std::string& name) {
  return io::read_features(feature_path(config, name));
}

RowMatrix model_features(const ExperimentConfig& config, const IdMap& items) {
  const auto name = config.json.at("model").at("features").get<std::string>();
  return align_rows(load_named_features(config, name), items.ids()).values;
}

std::optional<RowMatrix> load_genres(const ExperimentConfig& config, const IdMap& items) {
  const fs::path path = config.json.at("data").at("genres").get<std::string>();
  if (!fs::exists(path)) return std::nullopt;
  const auto encoded = encode_genres(io::read_genres_csv(path));
  FeatureMatrix as_features{encoded.item_ids, encoded.values};
  return align_rows(as_features, items.ids()).values;
}

}  // namespace

void cmd_synth(const ExperimentConfig& config) {
  const auto& s = config.json.at("synth");
  SynthConfig sc;
  sc.n_users = s.at("n_users").get<Index>();
  sc.n_items = s.at("n_items").get<Index>();
  sc.n_cold = s.at("n_cold").get<Index>();
  sc.feature_dim = s.at("feature_dim").get<Index>();
  sc.latent_dim = s.at("latent_dim").get<Index>();
  sc.popularity_skew = s.at("popularity_skew").get<double>();
  sc.noise_std = s.at("noise_std").get<double>();
  sc.density_target = s.at("density").get<double>();
  sc.seed = sub_seed(config, "synth");
  const int modalities = s.at("modalities").get<int>();
  const Index frames_per_item = s.at("frames_per_item").get<Index>();
  const double frame_noise = s.at("frame_noise").get<double>();
  if (sc.n_cold >= sc.n_items) throw std::invalid_argument("synth: n_cold must be smaller than n_items");

  const SynthDataset ds = synth_dataset(sc);
  const auto parts = split_modalities(ds.features, modalities);

  io::build_dir_atomic(config.out() / "data", [&](const fs::path& dir) {
    // Rating 5 marks a positive; rating 1 rows register users and items
    // that have no positives so they keep their place in the catalogue.
    std::string csv = "user_id,item_id,rating\n";
    for (const auto& p : ds.interactions.positives()) {
      csv += "u" + std::to_string(p.user) + ",i" + std::to_string(p.item) + ",5\n";
    }
    for (Index u = 0; u < sc.n_users; ++u) {
      if (ds.interactions.user_count(u) == 0) csv += "u" + std::to_string(u) + ",i0,1\n";
    }
    for (Index i = 0; i < sc.n_items; ++i) {
      if (ds.interactions.item_count(i) == 0 && !ds.interactions.contains(0, i)) csv += "u0,i" + std::to_string(i) + ",1\n";
    }
    io::write_text_atomic(dir / "interactions.csv", csv);
    io::write_fmat(dir / "features" / "content.fmat", ds.features);
    for (std::size_t m = 0; m < parts.size(); ++m) {
      const fs::path frame_dir = dir / "frames" / ("mod" + std::to_string(m));
      fs::create_directories(frame_dir);
      for (const auto& f : synth_frames(parts[m], frames_per_item, frame_noise, sc.seed + m)) {
        io::write_text_atomic(frame_dir / (f.item_id + ".csv"), io::frames_csv(f.values));
      }
    }
    io::write_text_atomic(dir / "genres.csv", io::genres_csv(ds.genres));
    json truth = {{"threshold", ds.truth.threshold},
                  {"realized_density", ds.truth.realized_density},
                  {"n_cold", ds.truth.n_cold},
                  {"n_positives", ds.interactions.nnz()},
                  {"popularity_bias", std::vector<double>(ds.truth.popularity_bias.data(),
                                                          ds.truth.popularity_bias.data() + ds.truth.popularity_bias.size())}};
    io::write_text_atomic(dir / "ground_truth.json", truth.dump(2) + "\n");
    io::write_text_atomic(dir / "config.json", echo(config));
  });
}

void cmd_split(const ExperimentConfig& config) {
  const fs::path interactions = config.json.at("data").at("interactions").get<std::string>();
  require_exists(interactions, "set data.interactions or run `synth`");
  const auto raw = io::read_ratings_csv(interactions);
  const auto bin = binarize(raw, config.json.at("data").at("positive_threshold").get<double>());
  const auto& s = config.json.at("split");
  const auto r = s.at("ratios").get<std::vector<double>>();
  if (r.size() != 3) throw std::invalid_argument("split.ratios must hold three fractions");
  const auto folds = split_folds(bin.matrix, s.at("n_folds").get<int>(), {r[0], r[1], r[2]}, sub_seed(config, "split"));
  io::build_dir_atomic(split_dir(config), [&](const fs::path& dir) {
    io::write_folds(dir, folds, bin.users, bin.items);
    io::write_text_atomic(dir / "config.json", echo(config));
  });
}

void cmd_aggregate(const ExperimentConfig& config) {
  const auto& p = config.json.at("pipeline");
  const Aggregator agg = parse_aggregator(p.at("aggregator").get<std::string>());
  const PipelineFlags flags{p.at("ssr").get<bool>(), p.at("pca").get<bool>(), p.at("l2").get<bool>()};

  std::vector<std::pair<std::string, fs::path>> modalities;
  const auto& frames = config.json.at("data").at("frames");
  if (frames.is_object()) {
    for (const auto& [name, dir] : frames.items()) modalities.emplace_back(name, dir.get<std::string>());
  } else {
    const fs::path root = config.out() / "data" / "frames";
    require_exists(root, "set data.frames or run `synth`");
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory()) modalities.emplace_back(e.path().filename().string(), e.path());
    }
    std::sort(modalities.begin(), modalities.end());
  }
  if (modalities.empty()) throw std::runtime_error("no frame directories to aggregate");
  for (const auto& [name, dir] : modalities) {
    const auto frames_of_items = io::read_frames_dir(dir);
    io::write_fmat(features_dir(config) / (name + ".fmat"), build_descriptors(frames_of_items, agg, flags));
  }
  io::write_text_atomic(features_dir(config) / "aggregate_config.json", echo(config));
}

void cmd_fuse(const ExperimentConfig& config) {
  const auto& f = config.json.at("fusion");
  if (!f.is_object()) throw std::invalid_argument("fuse: the configuration has no fusion section");
  FusionSpec spec;
  spec.method = parse_fusion_method(f.value("method", "concat"));
  spec.inputs = f.at("inputs").get<std::vector<std::string>>();
  spec.renormalize = f.value("renormalize", true);
  if (f.contains("reduce_dim") && !f.at("reduce_dim").is_null()) spec.reduce_dim = f.at("reduce_dim").get<Index>();
  if (spec.inputs.size() < 2) throw std::invalid_argument("fuse: fusion needs at least two inputs");

  std::vector<FeatureMatrix> inputs;
  for (const auto& name : spec.inputs) {
    auto m = load_named_features(config, name);
    if (!inputs.empty()) m = align_rows(m, inputs.front().item_ids);
    inputs.push_back(std::move(m));
  }
  std::string name = f.value("output", std::string());
  if (name.empty()) {
    name = std::string(to_string(spec.method)) + "_";
    for (std::size_t k = 0; k < spec.inputs.size(); ++k) name += (k ? "+" : "") + spec.inputs[k];
  }
  io::write_fmat(features_dir(config) / (name + ".fmat"), fuse(spec, inputs));
  io::write_text_atomic(features_dir(config) / (name + ".config.json"), echo(config));
}

void cmd_train(const ExperimentConfig& config, bool use_tuned_scaling) {
  const auto split = load_split(config);
  const RowMatrix x = model_features(config, split.items);
  CerHyperParams hyper = hyper_of(config);
  ExperimentConfig resolved = config;
  if (use_tuned_scaling) {
    const fs::path best = config.out() / "tuning" / "best_d.json";
    require_exists(best, "run `tune` first");
    hyper.scaling = json::parse(io::read_file(best)).at("best_d").get<double>();
    resolved.json["model"]["scaling"] = hyper.scaling;
  }
  io::build_dir_atomic(models_dir(config), [&](const fs::path& dir) {
    for (const auto& fold : split.folds) {
      const auto v = holdout_validation(fold.train, hyper.validation_fraction,
                                        hyper.seed + static_cast<std::uint64_t>(fold.fold_index));
      const CerModel model = train(v.train, x, fold.warm_items, hyper, v.validation);
      io::save_model(dir / ("fold" + std::to_string(fold.fold_index)), model, &split.users, &split.items);
    }
    io::write_text_atomic(dir / "config.json", echo(resolved));
  });
}

void cmd_tune(const ExperimentConfig& config) {
  const auto split = load_split(config);
  const RowMatrix x = model_features(config, split.items);
  const auto& t = config.json.at("tuning");
  SearchSpace space;
  space.lower = t.at("lower").get<double>();
  space.upper = t.at("upper").get<double>();
  space.budget = t.at("budget").get<int>();
  space.strategy = parse_search_strategy(t.at("strategy").get<std::string>());
  space.seed = sub_seed(config, "tuner");
  const auto result = tune_scaling(split.folds, x, hyper_of(config), space);
  io::build_dir_atomic(config.out() / "tuning", [&](const fs::path& dir) {
    std::string trace = "candidate,fold,map5\n";
    for (const auto& trial : result.trace) {
      if (trial.failed) {
        trace += json(trial.d).dump() + ",failed,\n";
        continue;
      }
      for (std::size_t f = 0; f < trial.fold_map5.size(); ++f) {
        trace += json(trial.d).dump() + "," + std::to_string(split.folds[f].fold_index) + "," +
                 json(trial.fold_map5[f]).dump() + "\n";
      }
    }
    io::write_text_atomic(dir / "tuning_trace.csv", trace);
    json best = {{"best_d", result.best_d}, {"best_mean_map5", result.best_mean},
                 {"strategy", std::string(to_string(space.strategy))}, {"evaluations", result.trace.size()}};
    io::write_text_atomic(dir / "best_d.json", best.dump(2) + "\n");
    io::write_text_atomic(dir / "config.json", echo(config));
  });
}

void cmd_evaluate(const ExperimentConfig& config, const std::string& scenario, bool markdown) {
  ExperimentConfig resolved = config;
  if (!scenario.empty()) resolved.json["evaluation"]["scenario"] = scenario;
  EvaluationConfig ec = evaluation_of(resolved);
  const auto split = load_split(resolved);
  for (const auto& fold : split.folds) {
    require_exists(models_dir(resolved) / ("fold" + std::to_string(fold.fold_index)) / "hyper.json", "run `train` first");
  }
  const RowMatrix x = model_features(resolved, split.items);
  ec.genres = load_genres(resolved, split.items);

  EvaluationReport report;
  report.scenario = ec.scenario;
  report.cutoffs = ec.cutoffs;
  for (const auto& fold : split.folds) {
    const CerModel model = io::load_model(models_dir(resolved) / ("fold" + std::to_string(fold.fold_index)));
    report.folds.push_back(evaluate_fold(model, fold, x, ec));
  }
  report.summarize();
  const std::string label = std::string(to_string(ec.scenario));
  io::build_dir_atomic(resolved.out() / "eval" / label, [&](const fs::path& dir) {
    io::write_text_atomic(dir / "report.json", io::report_to_json(report).dump(2) + "\n");
    io::write_text_atomic(dir / "report.csv", io::report_csv(report));
    if (markdown) io::write_text_atomic(dir / "report.md", io::comparison_markdown({{label, report}}));
    io::write_text_atomic(dir / "config.json", echo(resolved));
  });
}

std::string cmd_report(const std::vector<fs::path>& runs, const std::string& format) {
  if (runs.empty()) throw std::invalid_argument("report: no runs given");
  std::vector<io::ReportRow> rows;
  for (const auto& run : runs) {
    const fs::path file = fs::is_directory(run) ? run / "report.json" : run;
    require_exists(file, "expected an evaluation directory holding report.json");
    fs::path label_path = fs::is_directory(run) ? run : run.parent_path();
    std::string label = label_path.lexically_normal().string();
    while (!label.empty() && label.back() == '/') label.pop_back();
    rows.push_back({label, io::report_from_json(json::parse(io::read_file(file)))});
  }
  if (format == "markdown") return io::comparison_markdown(rows);
  if (format == "csv") return io::comparison_csv(rows);
  if (format == "json") {
    // Cutoff consistency is checked by the table renderers.
    (void)io::comparison_csv(rows);
    json out = json::array();
    for (const auto& r : rows) out.push_back({{"run", r.label}, {"report", io::report_to_json(r.report)}});
    return out.dump(2) + "\n";
  }
  throw std::invalid_argument("report: unknown format '" + format + "' (json, csv or markdown)");
}

int run(int argc, char** argv) {
  CLI::App app{"coldrec: scaled-CER cold-start recommender experiments"};
  app.require_subcommand(1);
  std::optional<std::string> config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "experiment configuration (JSON)");
  app.add_option("--seed", seed, "global seed");
  app.add_option("--out", out, "run directory");
  app.add_option("--threads", threads, "OpenMP threads (falls back to COLDREC_THREADS)");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset into <out>/data");
  auto* split = app.add_subcommand("split", "binarize interactions and write warm/cold folds");
  auto* aggregate = app.add_subcommand("aggregate", "frame descriptors -> item features");
  auto* fuse_cmd = app.add_subcommand("fuse", "early-fuse feature sets");
  auto* train_cmd = app.add_subcommand("train", "train one model per fold");
  bool use_tuned = false;
  train_cmd->add_flag("--use-tuned", use_tuned, "take the scaling factor from <out>/tuning/best_d.json");
  auto* tune = app.add_subcommand("tune", "search the scaling factor d");
  auto* evaluate = app.add_subcommand("evaluate", "score trained models on a scenario");
  std::string scenario;
  bool markdown = false;
  evaluate->add_option("--scenario", scenario, "warm or cold")->check(CLI::IsMember({"warm", "cold"}));
  evaluate->add_flag("--markdown", markdown, "also write report.md");
  auto* report = app.add_subcommand("report", "compare evaluation reports");
  std::vector<std::string> runs;
  std::string format = "markdown";
  report->add_option("runs", runs, "evaluation directories or report.json files")->required();
  report->add_option("--format", format, "json, csv or markdown")->check(CLI::IsMember({"json", "csv", "markdown"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (report->parsed()) {
      std::vector<fs::path> paths(runs.begin(), runs.end());
      std::cout << cmd_report(paths, format);
      return 0;
    }
    std::optional<fs::path> file;
    if (config_path) file = *config_path;
    const ExperimentConfig config = resolve_config(file, seed, out, threads);
    als::set_threads(resolve_threads(threads, config));
    if (synth->parsed()) cmd_synth(config);
    if (split->parsed()) cmd_split(config);
    if (aggregate->parsed()) cmd_aggregate(config);
    if (fuse_cmd->parsed()) cmd_fuse(config);
    if (train_cmd->parsed()) cmd_train(config, use_tuned);
    if (tune->parsed()) cmd_tune(config);
    if (evaluate->parsed()) cmd_evaluate(config, scenario, markdown);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace coldrec::cli
