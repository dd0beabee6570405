#include "fidtrust/augment.hpp"
#include "fidtrust/embedder.hpp"
#include "fidtrust/experiments.hpp"
#include "fidtrust/image_io.hpp"
#include "fidtrust/metrics.hpp"
#include "fidtrust/parallel.hpp"
#include "fidtrust/result_table.hpp"
#include "fidtrust/rng.hpp"
#include "fidtrust/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fidtrust;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::string format = "csv";
};

struct EmbedderFlags {
  std::size_t embed_dim = 64;
  std::vector<std::size_t> hidden = {256, 128};
  double dropout = 0.2;
  std::size_t size = 32;
  std::size_t channels = 3;
  std::size_t pool_grid = 8;
  bool no_standardize = false;

  void add(CLI::App* app) {
    app->add_option("--embed-dim", embed_dim, "Latent dimension K")->capture_default_str();
    app->add_option("--hidden", hidden, "Hidden layer widths")->capture_default_str()->expected(0, -1);
    app->add_option("--dropout", dropout, "Dropout rate p in [0, 1)")->capture_default_str();
    app->add_option("--size", size, "Input side length in pixels")->capture_default_str();
    app->add_option("--channels", channels, "Input channels (1 or 3)")->capture_default_str();
    app->add_option("--pool-grid", pool_grid, "Average-pooling grid side")->capture_default_str();
    app->add_flag("--no-standardize", no_standardize, "Map pixels by value range instead of per-image standardisation");
  }

  ToyEmbedderConfig config(std::uint64_t seed) const {
    ToyEmbedderConfig c;
    c.embed_dim = embed_dim;
    c.hidden_dims = hidden;
    c.dropout_rate = dropout;
    c.height = size;
    c.width = size;
    c.channels = channels;
    c.pool_grid = pool_grid;
    c.standardize = !no_standardize;
    c.weight_seed = derive_seed(seed, "weights");
    return c;
  }
};

std::uint64_t resolve_seed(const Globals& g) {
  if (g.seed) return *g.seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

std::string render(const std::vector<std::pair<std::string, double>>& values, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json doc;
    for (const auto& [k, v] : values) doc[k] = v;
    return doc.dump(2) + "\n";
  }
  std::string out = "metric,value\n";
  for (const auto& [k, v] : values) out += k + "," + format_double(v) + "\n";
  return out;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::vector<ImageTensor> input_images(const std::string& dir, const std::string& synthetic, std::uint64_t seed,
                                      const ToyEmbedderConfig& cfg, std::vector<fs::path>* names = nullptr) {
  if (!synthetic.empty()) {
    SyntheticSpec spec = parse_synthetic_spec(synthetic);
    spec.height = cfg.height;
    spec.width = cfg.width;
    spec.channels = cfg.channels;
    return make_synthetic_set(spec, derive_seed(seed, "synthetic"));
  }
  return load_image_dir(dir, names);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frechet distance quality metrics over stochastic embeddings", "fidtrust"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed (generated and printed when omitted)");
  app.add_option("--threads", g.threads, "Worker threads (default: FIDTRUST_THREADS, then all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file or directory");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // embed
  auto* embed = app.add_subcommand("embed", "Embed images with the toy network and write a .npy file");
  std::string embed_dir, embed_synth, embed_dtype = "f8";
  std::size_t mcd = 0;
  EmbedderFlags embed_net;
  auto* embed_src = embed->add_option("--images", embed_dir, "Directory of PGM/PPM/.npy images");
  embed->add_option("--synthetic", embed_synth, "Synthetic set kind:count[:shift]")->excludes(embed_src);
  embed->add_option("--mcd", mcd, "Stochastic passes J (0: dropout off, 2-D output)")->capture_default_str();
  embed->add_option("--dtype", embed_dtype, "Stored float width")
      ->check(CLI::IsMember({"f4", "f8"}))
      ->capture_default_str();
  embed_net.add(embed);

  // fid
  auto* fid = app.add_subcommand("fid", "FID of a test embedding file against a reference file");
  std::string fid_test, fid_ref, fid_decomp;
  fid->add_option("--test", fid_test, "Test embeddings, (I, K) or (I, J, K)")->required();
  fid->add_option("--reference", fid_ref, "Reference embeddings, (I, K)")->required();
  fid->add_option("--decomposition", fid_decomp, "CSV of per-evaluation terms (3-D test only)");

  // knn
  auto* knn = app.add_subcommand("knn", "Mean k-NN distance of L2-normalised test rows to reference rows");
  std::string knn_test, knn_ref;
  std::size_t knn_k = 5;
  knn->add_option("--test", knn_test, "Test embeddings, (I, K)")->required();
  knn->add_option("--reference", knn_ref, "Reference embeddings, (I, K)")->required();
  knn->add_option("-k", knn_k, "Neighbours")->capture_default_str()->check(CLI::PositiveNumber);

  // augment
  auto* augment = app.add_subcommand("augment", "Augment a directory of images");
  std::string aug_dir, aug_kind = "noise", aug_source;
  AugmentSpec aug;
  augment->add_option("--images", aug_dir, "Input directory")->required();
  augment->add_option("--kind", aug_kind, "Augmentation")->check(CLI::IsMember({"noise", "overlay"}))->capture_default_str();
  augment->add_option("--strength", aug.strength_percent, "Noise sigma, % of the image maximum")->capture_default_str();
  augment->add_option("--patches", aug.n_patches, "Overlay patch count")->capture_default_str();
  augment->add_option("--patch-scale", aug.patch_scale, "Overlay patch side / min(H, W)")->capture_default_str();
  augment->add_option("--patch-source", aug_source, "Directory of patch source images (default: the inputs)");
  augment->add_flag("--clip", aug.clip, "Clamp results to the image value range");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run one of the four experiment protocols");
  std::string exp_name, exp_data = "mixed:512", exp_reference = "mixed:256", exp_ref_dropout, exp_knn = "off";
  std::vector<std::string> exp_tests;
  std::vector<double> exp_strengths = {0, 5, 20, 50, 100};
  std::vector<std::string> exp_charts = {"fid", "sigma_fid", "pvar"};
  std::size_t exp_J = 20, exp_k = 5;
  std::string exp_latents, exp_top5;
  bool exp_no_charts = false;
  EmbedderFlags exp_net;
  experiment->add_option("name", exp_name, "equal-aug, ood-table, sensitivity or fixed-test")
      ->required()
      ->check(CLI::IsMember({"equal-aug", "ood-table", "sensitivity", "fixed-test"}));
  experiment->add_option("--data", exp_data, "Dataset split into halves: synthetic spec or image directory")
      ->capture_default_str();
  experiment->add_option("--reference", exp_reference, "ood-table reference: synthetic spec, directory or 2-D .npy")
      ->capture_default_str();
  experiment->add_option("--test", exp_tests, "ood-table test set (repeatable): synthetic spec, directory or 3-D .npy");
  experiment->add_option("--strengths", exp_strengths, "Noise strengths in %, strictly increasing")
      ->capture_default_str()
      ->delimiter(',');
  experiment->add_option("-J,--samples", exp_J, "Stochastic passes per test set")->capture_default_str();
  experiment->add_option("-k", exp_k, "kNN neighbours")->capture_default_str();
  experiment->add_option("--reference-dropout", exp_ref_dropout, "on or off (default depends on the experiment)")
      ->check(CLI::IsMember({"on", "off"}));
  experiment->add_option("--knn-latents", exp_knn, "Test latents for kNN: off (dropout off) or first-pass")
      ->check(CLI::IsMember({"off", "first-pass"}))
      ->capture_default_str();
  experiment->add_option("--keep-latents", exp_latents, "Directory for per-condition latent .npy files");
  experiment->add_option("--top5", exp_top5, "CSV sidecar 'label,top5' joined as a column");
  experiment->add_option("--charts", exp_charts, "Metric columns to chart as SVG")
      ->capture_default_str()
      ->delimiter(',');
  experiment->add_flag("--no-charts", exp_no_charts, "Write no charts");
  exp_net.add(experiment);

  // report
  auto* report = app.add_subcommand("report", "Re-emit a results CSV and draw SVG charts from it");
  std::string rep_results;
  std::vector<std::string> rep_charts = {"fid", "sigma_fid", "pvar"};
  report->add_option("--results", rep_results, "Results CSV")->required();
  report->add_option("--charts", rep_charts, "Metric columns to chart")->capture_default_str()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    configure_threads(g.threads);

    if (*embed) {
      if (embed_dir.empty() && embed_synth.empty()) throw CLI::RequiredError("--images or --synthetic");
      if (g.out.empty()) throw CLI::RequiredError("--out");
      if (mcd == 1) throw std::invalid_argument("--mcd must be 0 or at least 2");
      const std::uint64_t seed = resolve_seed(g);
      const Embedder e(embed_net.config(seed));
      EmbedDiagnostics diag;
      const auto images = input_images(embed_dir, embed_synth, seed, e.config());
      const NpyDtype dtype = embed_dtype == "f4" ? NpyDtype::f4 : NpyDtype::f8;
      const fs::path tmp = g.out + ".tmp";
      try {
        if (mcd == 0) {
          const auto set = embed_deterministic(e, images, &diag);
          save_embeddings(tmp, set, dtype);
          std::cout << "wrote " << g.out << " (" << set.images() << ", " << set.dim() << ")\n";
        } else {
          const auto set = embed_stochastic(e, images, mcd, derive_seed(seed, "test-mcd"), &diag);
          save_embeddings(tmp, set, dtype);
          std::cout << "wrote " << g.out << " (" << set.images() << ", " << set.samples() << ", " << set.dim()
                    << ")\n";
        }
        fs::rename(tmp, g.out);
      } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
      }
      if (diag.resized) std::cerr << "note: resized " << diag.resized << " images\n";
      if (diag.channel_converted) std::cerr << "note: converted channels of " << diag.channel_converted << " images\n";
      for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
      return 0;
    }

    if (*fid) {
      const auto test = load_embeddings(fid_test);
      const auto ref_any = load_embeddings(fid_ref);
      if (!std::holds_alternative<EmbeddingSet>(ref_any)) {
        throw std::invalid_argument("reference must be 2-D (I, K), got a 3-D file");
      }
      const auto& ref = std::get<EmbeddingSet>(ref_any);
      const GaussianSummary ref_g = mean_and_cov(ref.matrix());
      std::vector<std::pair<std::string, double>> values;
      if (const auto* t2 = std::get_if<EmbeddingSet>(&test)) {
        if (!fid_decomp.empty()) throw std::invalid_argument("--decomposition needs a 3-D test file");
        if (t2->dim() != ref.dim()) throw std::invalid_argument("test and reference dimensions differ");
        const FrechetTerms t = frechet_terms(mean_and_cov(t2->matrix()), ref_g);
        values = {{"fid", t.value}, {"epsilon_test", t.epsilon_first}, {"epsilon_reference", t.epsilon_second}};
      } else {
        const auto& t3 = std::get<StochasticEmbeddingSet>(test);
        t3.validate();
        const FidDistribution d = fid_samples(t3, ref_g);
        const VfidDecomposition v = vfid_decomposition(d);
        values = {{"mean_fid", d.mean_fid},  {"sigma_fid", d.sigma_fid}, {"v_fid", d.v_fid},
                  {"pvar", pvar(t3)},         {"var_a", v.var_a},         {"var_b", v.var_b},
                  {"var_c", v.var_c},         {"cov_ab", v.cov_ab},       {"cov_ac", v.cov_ac},
                  {"cov_bc", v.cov_bc},       {"vfid_residual", v.residual},
                  {"reference_epsilon", d.reference_epsilon}, {"clamped_samples", static_cast<double>(d.clamp_count)}};
        if (!fid_decomp.empty()) {
          std::string csv = "j,fid,a,b,c,epsilon\n";
          for (std::size_t j = 0; j < d.fid_samples.size(); ++j) {
            csv += std::to_string(j) + "," + format_double(d.fid_samples[j]) + "," + format_double(d.terms_a[j]) +
                   "," + format_double(d.terms_b[j]) + "," + format_double(d.terms_c[j]) + "," +
                   format_double(d.sample_epsilons[j]) + "\n";
          }
          write_text_file(fid_decomp, csv);
        }
      }
      emit(render(values, g.format), g.out);
      return 0;
    }

    if (*knn) {
      const auto test = load_embeddings(knn_test);
      const auto ref = load_embeddings(knn_ref);
      if (!std::holds_alternative<EmbeddingSet>(test) || !std::holds_alternative<EmbeddingSet>(ref)) {
        throw std::invalid_argument("knn needs 2-D (I, K) test and reference files");
      }
      const double score = knn_ood_score(std::get<EmbeddingSet>(test), std::get<EmbeddingSet>(ref), knn_k);
      emit(render({{"knn", score}}, g.format), g.out);
      return 0;
    }

    if (*augment) {
      if (g.out.empty()) throw CLI::RequiredError("--out");
      aug.kind = parse_augment_kind(aug_kind);
      aug.seed = resolve_seed(g);
      aug.validate();
      std::vector<fs::path> names;
      const auto images = load_image_dir(aug_dir, &names);
      std::vector<ImageTensor> source;
      if (aug.kind == AugmentKind::overlay) source = aug_source.empty() ? images : load_image_dir(aug_source);
      const auto out = augment_set(images, aug, source);
      fs::create_directories(g.out);
      std::vector<fs::path> written;
      try {
        for (std::size_t i = 0; i < out.size(); ++i) {
          const fs::path dest = fs::path(g.out) / names[i].filename();
          save_image(dest, out[i]);
          written.push_back(dest);
        }
      } catch (...) {
        std::error_code ec;
        for (const auto& p : written) fs::remove(p, ec);
        throw;
      }
      std::cout << "wrote " << out.size() << " images to " << g.out << "\n";
      return 0;
    }

    if (*experiment) {
      ExperimentConfig cfg;
      cfg.kind = parse_experiment_kind(exp_name);
      cfg.seed = resolve_seed(g);
      cfg.data = DataSource::parse(exp_data);
      cfg.reference = DataSource::parse(exp_reference);
      for (const auto& t : exp_tests) cfg.tests.push_back(DataSource::parse(t));
      cfg.strengths = exp_strengths;
      cfg.J = exp_J;
      cfg.k = exp_k;
      if (!exp_ref_dropout.empty()) cfg.reference_dropout = exp_ref_dropout == "on";
      cfg.knn_latents = exp_knn == "off" ? KnnLatents::dropout_off : KnnLatents::first_pass;
      cfg.embedder = exp_net.config(cfg.seed);
      cfg.latents_dir = exp_latents;
      cfg.top5_path = exp_top5;
      cfg.validate();

      const fs::path dir = g.out.empty() ? fs::path("results") : fs::path(g.out);
      ExperimentLog log;
      const ResultTable table = run_experiment(cfg, &log);
      if (!exp_no_charts) {
        for (const auto& m : exp_charts) table.column_index(m);
      }
      fs::create_directories(dir);
      std::vector<std::string> outputs;
      const fs::path table_path = dir / (g.format == "json" ? "results.json" : "results.csv");
      write_text_file(table_path, g.format == "json" ? table.to_json() : table.to_csv());
      outputs.push_back(table_path.filename().string());
      if (!exp_no_charts) {
        for (const auto& m : exp_charts) {
          const fs::path chart = dir / (file_safe(m) + ".svg");
          write_text_file(chart, render_svg(metric_chart(table, m)));
          outputs.push_back(chart.filename().string());
        }
      }
      const fs::path manifest = dir / "manifest.json";
      outputs.push_back(manifest.filename().string());
      write_text_file(manifest, experiment_manifest(cfg, log, outputs));
      for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << table.to_csv();
      return 0;
    }

    if (*report) {
      const ResultTable table = read_result_csv(rep_results);
      for (const auto& m : rep_charts) table.column_index(m);
      if (g.out.empty()) {
        std::cout << (g.format == "json" ? table.to_json() : table.to_csv());
        return 0;
      }
      fs::create_directories(g.out);
      write_text_file(fs::path(g.out) / (g.format == "json" ? "results.json" : "results.csv"),
                      g.format == "json" ? table.to_json() : table.to_csv());
      for (const auto& m : rep_charts) {
        write_text_file(fs::path(g.out) / (file_safe(m) + ".svg"), render_svg(metric_chart(table, m)));
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
