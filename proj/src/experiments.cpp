#include "fidtrust/experiments.hpp"

#include "fidtrust/augment.hpp"
#include "fidtrust/image_io.hpp"
#include "fidtrust/image_metrics.hpp"
#include "fidtrust/metrics.hpp"
#include "fidtrust/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fidtrust {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kFidColumns = {
    "fid",    "sigma_fid", "v_fid",  "pvar",   "embedding_norm", "mean_term",         "mean_term_std", "var_a",
    "var_b",  "var_c",     "cov_ab", "cov_ac", "cov_bc",         "vfid_residual",     "reference_epsilon",
    "clamped_samples"};

std::vector<std::string> columns_with(std::vector<std::string> head, const std::vector<std::string>& tail = {}) {
  head.insert(head.end(), kFidColumns.begin(), kFidColumns.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

std::vector<double> fid_block(const StochasticEmbeddingSet& test, const GaussianSummary& reference) {
  const FidDistribution dist = fid_samples(test, reference);
  const VfidDecomposition d = vfid_decomposition(dist);
  const MeanTermDiagnostics m =
      mean_term_diagnostics(test, {reference.mean.data(), static_cast<std::size_t>(reference.mean.size())});
  return {dist.mean_fid,
          dist.sigma_fid,
          dist.v_fid,
          pvar(test),
          mean_embedding_norm(test),
          m.mean_term,
          m.mean_std,
          d.var_a,
          d.var_b,
          d.var_c,
          d.cov_ab,
          d.cov_ac,
          d.cov_bc,
          d.residual,
          dist.reference_epsilon,
          static_cast<double>(dist.clamp_count)};
}

class Run {
 public:
  Run(const ExperimentConfig& cfg, ExperimentLog* log) : cfg_(cfg), log_(log), embedder_(embedder_config(cfg)) {
    cfg_.validate();
    seed("weights", embedder_.config().weight_seed);
    test_mcd_ = seed("test-mcd", derive_seed(cfg.seed, "test-mcd"));
    reference_mcd_ = seed("reference-mcd", derive_seed(cfg.seed, "reference-mcd"));
    if (embedder_.config().dropout_rate == 0.0) warn("dropout rate is 0: stochastic passes equal the deterministic embedding");
  }

  const Embedder& embedder() const { return embedder_; }
  const ExperimentConfig& cfg() const { return cfg_; }
  std::uint64_t test_mcd() const { return test_mcd_; }
  std::uint64_t reference_mcd() const { return reference_mcd_; }

  std::uint64_t seed(const std::string& name, std::uint64_t value) {
    if (log_) log_->seeds.emplace_back(name, value);
    return value;
  }

  void warn(const std::string& message) {
    if (log_) log_->warnings.push_back(message);
  }

  std::vector<ImageTensor> images(const DataSource& src, const std::string& role) {
    if (src.type == DataSource::Type::embeddings) {
      throw std::invalid_argument(to_string(cfg_.kind) + ": '" + src.text() + "' is an embedding file; " + role +
                                  " needs images");
    }
    if (src.type == DataSource::Type::images) return load_image_dir(src.path);
    SyntheticSpec spec = src.synthetic;
    spec.height = cfg_.embedder.height;
    spec.width = cfg_.embedder.width;
    spec.channels = cfg_.embedder.channels;
    // The content seed ignores the shift, so sets that differ only in shift
    // hold the same base images.
    SyntheticSpec base = spec;
    base.shift = 0.0;
    const std::string name = "data/" + role + "/" + base.to_string();
    return make_synthetic_set(spec, seed(name, derive_seed(cfg_.seed, name)));
  }

  /// Reference latents, with dropout on (single pass 0) or off.
  EmbeddingSet reference_latents(const RowMatrix& features) const {
    if (!cfg_.reference_dropout_on()) return embed_features_pass(embedder_, features, nullptr);
    const DropoutMasks masks = embedder_.sample_masks(reference_mcd_, 0);
    return embed_features_pass(embedder_, features, &masks);
  }

  StochasticEmbeddingSet test_latents(const RowMatrix& features) const {
    return embed_stochastic_features(embedder_, features, cfg_.J, test_mcd_);
  }

  void keep(const std::string& label, const EmbeddingSet& reference, const StochasticEmbeddingSet& test) {
    if (cfg_.latents_dir.empty()) return;
    fs::create_directories(cfg_.latents_dir);
    const fs::path ref_path = cfg_.latents_dir / (file_safe(label) + ".reference.npy");
    const fs::path test_path = cfg_.latents_dir / (file_safe(label) + ".test.npy");
    save_embeddings(ref_path, reference);
    save_embeddings(test_path, test);
    if (log_) {
      log_->latent_files.push_back(ref_path);
      log_->latent_files.push_back(test_path);
    }
  }

  void finish(ResultTable& table) const {
    if (!cfg_.top5_path.empty()) join_top5(table, cfg_.top5_path);
  }

 private:
  static ToyEmbedderConfig embedder_config(const ExperimentConfig& cfg) {
    ToyEmbedderConfig e = cfg.embedder;
    e.weight_seed = derive_seed(cfg.seed, "weights");
    return e;
  }

  ExperimentConfig cfg_;
  ExperimentLog* log_;
  Embedder embedder_;
  std::uint64_t test_mcd_ = 0;
  std::uint64_t reference_mcd_ = 0;
};

struct Halves {
  std::vector<ImageTensor> reference;
  std::vector<ImageTensor> test;
};

Halves split(std::vector<ImageTensor> all, const std::string& what) {
  if (all.size() < 4) {
    throw std::invalid_argument(what + ": dataset too small to split (" + std::to_string(all.size()) +
                                " images, need at least 4)");
  }
  const std::size_t half = all.size() / 2;
  Halves h;
  h.reference.assign(std::make_move_iterator(all.begin()), std::make_move_iterator(all.begin() + half));
  h.test.assign(std::make_move_iterator(all.begin() + half), std::make_move_iterator(all.begin() + 2 * half));
  return h;
}

std::vector<ImageTensor> noised(Run& run, const std::vector<ImageTensor>& images, double strength,
                                const std::string& role) {
  AugmentSpec spec;
  spec.kind = AugmentKind::noise;
  spec.strength_percent = strength;
  const std::string name = "noise/" + role + "/" + strength_label(strength);
  spec.seed = run.seed(name, derive_seed(run.cfg().seed, name));
  return augment_set(images, spec);
}

std::vector<double> with_strength(double strength, std::vector<double> block) {
  block.insert(block.begin(), strength);
  return block;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::equal_augmentation: return "equal-aug";
    case ExperimentKind::ood_table: return "ood-table";
    case ExperimentKind::sensitivity: return "sensitivity";
    case ExperimentKind::fixed_test: return "fixed-test";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  if (text == "equal-aug") return ExperimentKind::equal_augmentation;
  if (text == "ood-table") return ExperimentKind::ood_table;
  if (text == "sensitivity") return ExperimentKind::sensitivity;
  if (text == "fixed-test") return ExperimentKind::fixed_test;
  throw std::invalid_argument("unknown experiment '" + text + "' (equal-aug, ood-table, sensitivity, fixed-test)");
}

DataSource DataSource::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty data source");
  DataSource src;
  for (const char* kind : {"blobs:", "textures:", "mixed:"}) {
    if (text.rfind(kind, 0) == 0) {
      src.type = Type::synthetic;
      src.synthetic = parse_synthetic_spec(text);
      return src;
    }
  }
  src.path = text;
  fs::path ext = src.path.extension();
  src.type = ext == ".npy" ? Type::embeddings : Type::images;
  return src;
}

std::string DataSource::text() const {
  return type == Type::synthetic ? synthetic.to_string() : path.string();
}

std::string DataSource::label() const {
  if (type == Type::synthetic) return synthetic.to_string();
  fs::path p = path;
  if (!p.has_filename()) p = p.parent_path();
  return type == Type::embeddings ? p.stem().string() : p.filename().string();
}

void ExperimentConfig::validate() const {
  if (J < 2) throw std::invalid_argument("experiment: J must be >= 2");
  if (k < 1) throw std::invalid_argument("experiment: k must be >= 1");
  embedder.validate();
  if (kind == ExperimentKind::ood_table) {
    if (tests.empty()) throw std::invalid_argument("ood-table: need at least one test set");
    return;
  }
  if (strengths.empty()) throw std::invalid_argument(to_string(kind) + ": strengths list is empty");
  for (std::size_t s = 0; s < strengths.size(); ++s) {
    if (!(strengths[s] >= 0.0) || !std::isfinite(strengths[s])) {
      throw std::invalid_argument(to_string(kind) + ": strengths must be finite and >= 0");
    }
    if (s > 0 && !(strengths[s] > strengths[s - 1])) {
      throw std::invalid_argument(to_string(kind) + ": strengths must be strictly increasing");
    }
  }
}

bool ExperimentConfig::reference_dropout_on() const {
  if (reference_dropout) return *reference_dropout;
  return kind == ExperimentKind::equal_augmentation || kind == ExperimentKind::fixed_test;
}

std::string strength_label(double strength) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "noise-%g", strength);
  return buf;
}

std::string file_safe(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

ResultTable run_equal_augmentation(const ExperimentConfig& cfg, ExperimentLog* log) {
  Run run(cfg, log);
  const Halves halves = split(run.images(cfg.data, "split"), "equal-aug");
  ResultTable table(columns_with({"strength"}));
  for (const double s : cfg.strengths) {
    const std::string label = strength_label(s);
    const auto ref_images = noised(run, halves.reference, s, "reference");
    const auto test_images = noised(run, halves.test, s, "test");
    const EmbeddingSet ref = run.reference_latents(embed_features(run.embedder(), ref_images));
    const StochasticEmbeddingSet test = run.test_latents(embed_features(run.embedder(), test_images));
    table.add_row(label, with_strength(s, fid_block(test, mean_and_cov(ref.matrix()))));
    run.keep(label, ref, test);
  }
  run.finish(table);
  return table;
}

ResultTable run_ood_table(const ExperimentConfig& cfg, ExperimentLog* log) {
  Run run(cfg, log);
  const Embedder& e = run.embedder();

  EmbeddingSet ref;
  if (cfg.reference.type == DataSource::Type::embeddings) {
    auto loaded = load_embeddings(cfg.reference.path);
    if (!std::holds_alternative<EmbeddingSet>(loaded)) {
      throw std::invalid_argument("ood-table: reference embedding file must be 2-D (I, K)");
    }
    ref = std::get<EmbeddingSet>(std::move(loaded));
  } else {
    ref = run.reference_latents(embed_features(e, run.images(cfg.reference, "reference")));
  }
  const GaussianSummary ref_summary = mean_and_cov(ref.matrix());

  ResultTable table(columns_with({}, {"knn"}));
  for (const auto& src : cfg.tests) {
    StochasticEmbeddingSet test;
    EmbeddingSet knn_latents;
    if (src.type == DataSource::Type::embeddings) {
      auto loaded = load_embeddings(src.path);
      if (!std::holds_alternative<StochasticEmbeddingSet>(loaded)) {
        throw std::invalid_argument("ood-table: test embedding file '" + src.text() + "' must be 3-D (I, J, K)");
      }
      test = std::get<StochasticEmbeddingSet>(std::move(loaded));
      test.validate();
      if (cfg.knn_latents == KnnLatents::dropout_off) {
        run.warn("kNN for '" + src.label() + "' uses the first evaluation: an embedding file has no dropout-off latents");
      }
      knn_latents = test.slice(0);
    } else {
      const RowMatrix features = embed_features(e, run.images(src, "test"));
      test = run.test_latents(features);
      knn_latents = cfg.knn_latents == KnnLatents::dropout_off ? embed_features_pass(e, features, nullptr)
                                                               : test.slice(0);
    }
    std::vector<double> row = fid_block(test, ref_summary);
    row.push_back(knn_ood_score(knn_latents, ref, cfg.k));
    table.add_row(src.label(), std::move(row));
    run.keep(src.label(), ref, test);
  }
  run.finish(table);
  return table;
}

ResultTable run_sensitivity_sweep(const ExperimentConfig& cfg, ExperimentLog* log) {
  Run run(cfg, log);
  const Halves halves = split(run.images(cfg.data, "split"), "sensitivity");
  const std::size_t scales =
      std::min<std::size_t>(5, max_ms_ssim_scales(cfg.embedder.height, cfg.embedder.width));
  if (scales == 0) throw std::invalid_argument("sensitivity: images too small for MS-SSIM");
  if (log) log->ms_ssim_scales = scales;

  const EmbeddingSet ref = run.reference_latents(embed_features(run.embedder(), halves.reference));
  const GaussianSummary ref_summary = mean_and_cov(ref.matrix());

  // Validators compare at the embedder's input size.
  std::vector<ImageTensor> clean;
  for (const auto& img : halves.test) {
    clean.push_back(img.height() == cfg.embedder.height && img.width() == cfg.embedder.width
                        ? img
                        : resize_nearest(img, cfg.embedder.height, cfg.embedder.width));
  }

  ResultTable table(columns_with({"strength"}, {"mae", "ms_ssim"}));
  for (const double s : cfg.strengths) {
    const std::string label = strength_label(s);
    const auto test_images = noised(run, clean, s, "test");
    const StochasticEmbeddingSet test = run.test_latents(embed_features(run.embedder(), test_images));

    std::vector<double> mae_i(clean.size()), ssim_i(clean.size());
    MsSsimOptions opts;
    opts.scales = scales;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::size_t i = 0; i < clean.size(); ++i) {
      mae_i[i] = mae(clean[i], test_images[i]);
      ssim_i[i] = ms_ssim(clean[i], test_images[i], opts);
    }
    double mae_mean = 0.0, ssim_mean = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      mae_mean += mae_i[i];
      ssim_mean += ssim_i[i];
    }
    mae_mean /= static_cast<double>(clean.size());
    ssim_mean /= static_cast<double>(clean.size());

    std::vector<double> row = with_strength(s, fid_block(test, ref_summary));
    row.push_back(mae_mean);
    row.push_back(ssim_mean);
    table.add_row(label, std::move(row));
    run.keep(label, ref, test);
  }
  run.finish(table);
  return table;
}

ResultTable run_fixed_test_sweep(const ExperimentConfig& cfg, ExperimentLog* log) {
  Run run(cfg, log);
  const Halves halves = split(run.images(cfg.data, "split"), "fixed-test");
  const StochasticEmbeddingSet test = run.test_latents(embed_features(run.embedder(), halves.test));

  ResultTable table(columns_with({"strength"}));
  for (const double s : cfg.strengths) {
    const std::string label = strength_label(s);
    const auto ref_images = noised(run, halves.reference, s, "reference");
    const EmbeddingSet ref = run.reference_latents(embed_features(run.embedder(), ref_images));
    table.add_row(label, with_strength(s, fid_block(test, mean_and_cov(ref.matrix()))));
    run.keep(label, ref, test);
  }
  run.finish(table);
  return table;
}

ResultTable run_experiment(const ExperimentConfig& cfg, ExperimentLog* log) {
  switch (cfg.kind) {
    case ExperimentKind::equal_augmentation: return run_equal_augmentation(cfg, log);
    case ExperimentKind::ood_table: return run_ood_table(cfg, log);
    case ExperimentKind::sensitivity: return run_sensitivity_sweep(cfg, log);
    case ExperimentKind::fixed_test: return run_fixed_test_sweep(cfg, log);
  }
  throw std::invalid_argument("unknown experiment kind");
}

std::string experiment_manifest(const ExperimentConfig& cfg, const ExperimentLog& log,
                                const std::vector<std::string>& outputs) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["tool"] = "fidtrust";
  doc["version"] = kVersion;
  doc["experiment"] = to_string(cfg.kind);
  doc["seed"] = cfg.seed;

  ordered_json c;
  if (cfg.kind == ExperimentKind::ood_table) {
    c["reference"] = cfg.reference.text();
    c["tests"] = ordered_json::array();
    for (const auto& t : cfg.tests) c["tests"].push_back(t.text());
    c["k"] = cfg.k;
    c["knn_latents"] = cfg.knn_latents == KnnLatents::dropout_off ? "dropout-off" : "first-pass";
  } else {
    c["data"] = cfg.data.text();
    c["strengths"] = cfg.strengths;
    c["augment"] = "noise";
  }
  c["J"] = cfg.J;
  c["reference_dropout"] = cfg.reference_dropout_on() ? "on" : "off";
  ordered_json e;
  e["height"] = cfg.embedder.height;
  e["width"] = cfg.embedder.width;
  e["channels"] = cfg.embedder.channels;
  e["embed_dim"] = cfg.embedder.embed_dim;
  e["hidden_dims"] = cfg.embedder.hidden_dims;
  e["dropout_rate"] = cfg.embedder.dropout_rate;
  e["pool_grid"] = cfg.embedder.pool_grid;
  e["standardize"] = cfg.embedder.standardize;
  e["weight_seed"] = derive_seed(cfg.seed, "weights");
  c["embedder"] = e;
  c["keep_latents"] = cfg.latents_dir.empty() ? ordered_json(nullptr) : ordered_json(cfg.latents_dir.string());
  c["top5"] = cfg.top5_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.top5_path.string());
  doc["config"] = c;

  ordered_json seeds = ordered_json::object();
  for (const auto& [name, value] : log.seeds) seeds[name] = value;
  doc["derived_seeds"] = seeds;

  ordered_json diag;
  if (cfg.kind == ExperimentKind::sensitivity) diag["ms_ssim_scales"] = log.ms_ssim_scales;
  diag["warnings"] = log.warnings;
  doc["diagnostics"] = diag;

  ordered_json files = outputs;
  for (const auto& p : log.latent_files) files.push_back(p.string());
  doc["outputs"] = files;
  return doc.dump(2) + "\n";
}

LineChart metric_chart(const ResultTable& table, const std::string& metric) {
  LineChart chart;
  chart.title = metric;
  chart.y_label = metric;
  if (table.has_column("strength")) {
    chart.x = table.column("strength");
    chart.x_label = "strength (%)";
  } else {
    for (std::size_t r = 0; r < table.size(); ++r) {
      chart.x.push_back(static_cast<double>(r));
      chart.x_ticks.push_back(table.rows()[r].label);
    }
    chart.x_label = "test set";
  }
  chart.series.push_back({metric, table.column(metric)});
  return chart;
}

}  // namespace fidtrust
