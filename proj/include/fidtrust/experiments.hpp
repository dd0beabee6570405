#pragma once

#include "fidtrust/chart.hpp"
#include "fidtrust/embedder.hpp"
#include "fidtrust/result_table.hpp"
#include "fidtrust/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fidtrust {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { equal_augmentation, ood_table, sensitivity, fixed_test };

/// "equal-aug", "ood-table", "sensitivity", "fixed-test"
std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);

/// Where a set of images or latents comes from. Text forms: a synthetic
/// spec ("mixed:512", "blobs:256:0.3"), a .npy embedding file, or a
/// directory of images.
struct DataSource {
  enum class Type { synthetic, images, embeddings };
  Type type = Type::synthetic;
  SyntheticSpec synthetic;
  std::filesystem::path path;

  static DataSource parse(const std::string& text);
  std::string text() const;
  /// Row label: the synthetic spec, or the file or directory name.
  std::string label() const;
};

/// Which test latents the kNN column uses: dropout off, or the first
/// stochastic evaluation.
enum class KnnLatents { dropout_off, first_pass };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::equal_augmentation;
  DataSource data = DataSource::parse("mixed:512");  // split in two halves
  DataSource reference = DataSource::parse("mixed:256");  // ood-table
  std::vector<DataSource> tests;                         // ood-table
  std::vector<double> strengths = {0.0, 5.0, 20.0, 50.0, 100.0};
  std::size_t J = 20;
  std::size_t k = 5;
  ToyEmbedderConfig embedder;  // weight_seed is replaced by derive_seed(seed, "weights")
  /// Unset means the experiment's own default: on for equal-aug and
  /// fixed-test, off for sensitivity and ood-table.
  std::optional<bool> reference_dropout;
  KnnLatents knn_latents = KnnLatents::dropout_off;
  std::uint64_t seed = 0;
  std::filesystem::path latents_dir;  // empty: latents are not kept
  std::filesystem::path top5_path;    // empty: no top-5 column

  /// Throws std::invalid_argument.
  void validate() const;
  bool reference_dropout_on() const;
};

struct ExperimentLog {
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> latent_files;
  std::size_t ms_ssim_scales = 0;
};

/// Both halves noise-augmented at each strength; reference latents from a
/// single evaluation with dropout on (by default), test latents from J.
ResultTable run_equal_augmentation(const ExperimentConfig& cfg, ExperimentLog* log = nullptr);

/// One row per test set against a fixed reference, with a kNN column.
ResultTable run_ood_table(const ExperimentConfig& cfg, ExperimentLog* log = nullptr);

/// Fixed unaugmented reference half; the other half noise-augmented per
/// strength, with MAE and MS-SSIM against its unaugmented images.
ResultTable run_sensitivity_sweep(const ExperimentConfig& cfg, ExperimentLog* log = nullptr);

/// Fixed unaugmented test half (one stochastic tensor reused for every
/// row); the reference half augmented per strength.
ResultTable run_fixed_test_sweep(const ExperimentConfig& cfg, ExperimentLog* log = nullptr);

ResultTable run_experiment(const ExperimentConfig& cfg, ExperimentLog* log = nullptr);

/// JSON run manifest: resolved config, derived seeds, diagnostics and the
/// list of written files. Contains nothing time- or host-dependent.
std::string experiment_manifest(const ExperimentConfig& cfg, const ExperimentLog& log,
                                const std::vector<std::string>& outputs);

/// One chart per metric column, against strength when the table has a
/// strength column and against row order otherwise.
LineChart metric_chart(const ResultTable& table, const std::string& metric);

/// Condition label of a strength, e.g. "noise-20".
std::string strength_label(double strength);

/// Replaces characters outside [A-Za-z0-9._-] with '_'.
std::string file_safe(const std::string& label);

}  // namespace fidtrust
