// tacsum: command-line front end for the summarization library.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include "tacsum/tacsum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_config_options(CLI::App* cmd, tacsum::PipelineConfig& c) {
  static const std::map<std::string, tacsum::KeyframeRule> rules{{"mean", tacsum::KeyframeRule::Mean},
                                                                 {"middle", tacsum::KeyframeRule::Middle},
                                                                 {"ends", tacsum::KeyframeRule::Ends},
                                                                 {"middle+ends", tacsum::KeyframeRule::MiddleEnds}};
  static const std::map<std::string, tacsum::Interpolation> interps{{"cosine", tacsum::Interpolation::Cosine},
                                                                    {"linear", tacsum::Interpolation::Linear}};
  static const std::map<std::string, tacsum::BiasMode> modes{{"increase-keyframes", tacsum::BiasMode::IncreaseKeyframes},
                                                             {"decrease-others", tacsum::BiasMode::DecreaseOthers}};
  static const std::map<std::string, tacsum::UserAggregation> aggs{{"max", tacsum::UserAggregation::Max},
                                                                   {"mean", tacsum::UserAggregation::Mean}};

  cmd->add_option("--rate", c.rate, "target sample rate R (samples/second)")->capture_default_str();
  cmd->add_option("--pca-dim", c.pca_dim, "PCA output dimension")->capture_default_str();
  cmd->add_option("--tsne-dim", c.tsne_dim, "t-SNE output dimension")->capture_default_str();
  cmd->add_option("--perplexity", c.perplexity, "t-SNE perplexity")->capture_default_str();
  cmd->add_option("--tsne-iters", c.tsne_iters, "t-SNE iterations")->capture_default_str();
  cmd->add_option("--k-max", c.k_max, "maximum cluster count")->capture_default_str();
  cmd->add_option("--k-midpoint", c.k_midpoint, "sample count at the sigmoid midpoint")->capture_default_str();
  cmd->add_option("--k-scale", c.k_scale, "sigmoid scale")->capture_default_str();
  cmd->add_option("--branching", c.birch_branching, "CF-tree branching factor")->capture_default_str();
  cmd->add_option("--threshold-factor", c.birch_threshold_factor, "CF-tree threshold / median distance")
      ->capture_default_str();
  cmd->add_option("--window", c.window, "smoothing window W (odd)")->capture_default_str();
  cmd->add_option("--min-len", c.min_len, "minimum partition length")->capture_default_str();
  cmd->add_option("--keyframes", c.keyframe_rule, "keyframe rule")
      ->transform(CLI::CheckedTransformer(rules, CLI::ignore_case));
  cmd->add_option("--interp", c.interp, "score interpolation")
      ->transform(CLI::CheckedTransformer(interps, CLI::ignore_case));
  cmd->add_option("--bias-mode", c.bias_mode, "keyframe biasing scheme")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  cmd->add_option("--bias", c.bias, "bias strength B in [0, 1]")->capture_default_str();
  cmd->add_option("--budget", c.budget, "summary length as a fraction of the video")->capture_default_str();
  cmd->add_option("--aggregate", c.aggregation, "f-measure aggregation over users")
      ->transform(CLI::CheckedTransformer(aggs, CLI::ignore_case));
  cmd->add_option("--seed", c.seed, "random seed")->envname("TACSUM_SEED")->capture_default_str();
  cmd->add_flag("!--temporal,--no-temporal", c.temporal, "skip semantic partitioning");
}

tacsum::PipelineConfig checked(const tacsum::PipelineConfig& c) {
  try {
    return tacsum::validate(c);
  } catch (const tacsum::ConfigError& e) {
    throw UsageError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tacsum::FormatError("cannot write " + path);
  out << text;
}

// --- summarize -------------------------------------------------------------

struct SummarizeArgs {
  std::string input;
  std::string output;
  std::string plot;
  std::string annotation;
};

int run_summarize(const SummarizeArgs& a, const tacsum::PipelineConfig& config) {
  checked(config);
  const auto e = tacsum::load_tacemb(a.input);
  auto artifacts = tacsum::summarize(e, config);
  if (!artifacts.warning.empty()) std::cerr << "warning: " << artifacts.warning << '\n';
  if (!a.annotation.empty()) {
    const auto video = tacsum::load_annotation(a.annotation);
    const auto r = tacsum::evaluate_scores(video, artifacts.summary.frame_scores, config.budget, config.aggregation);
    artifacts.summary.selected_segments = r.selected_segments;
  }

  json j = tacsum::to_json(artifacts.summary);
  j["sample_indices"] = e.map.sample_indices;
  j["num_clusters"] = artifacts.clusters.fine.num_clusters;
  j["config"] = config;
  const std::string text = j.dump() + "\n";
  if (a.output.empty() || a.output == "-") std::cout << text;
  else write_text(a.output, text);

  if (!a.plot.empty()) {
    const auto& s = artifacts.summary;
    write_text(a.plot, tacsum::score_plot_svg(artifacts.flat, s.sample_scores, s.keyframes, s.partitions));
  }
  return 0;
}

// --- corpus helpers --------------------------------------------------------

struct CorpusEntry {
  std::string id;
  fs::path annotation;
  fs::path embedding;
};

// Pairs <id>.json with <id>.tacemb. Unpaired files are reported in `missing`.
std::vector<CorpusEntry> scan_corpus(const fs::path& dir, bool need_embeddings, std::vector<std::string>& missing) {
  if (!fs::is_directory(dir)) throw tacsum::FormatError("not a directory: " + dir.string());
  std::map<std::string, CorpusEntry> by_id;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (!f.is_regular_file()) continue;
    const auto ext = f.path().extension().string();
    const auto id = f.path().stem().string();
    if (ext == ".json") by_id[id].annotation = f.path();
    else if (ext == ".tacemb") by_id[id].embedding = f.path();
    else continue;
    by_id[id].id = id;
  }
  std::vector<CorpusEntry> out;
  for (auto& [id, entry] : by_id) {
    if (entry.annotation.empty() || (need_embeddings && entry.embedding.empty())) {
      missing.push_back(id);
      continue;
    }
    out.push_back(entry);
  }
  if (out.empty() && missing.empty()) throw tacsum::FormatError("no videos found in " + dir.string());
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// --- evaluate --------------------------------------------------------------

struct CorpusArgs {
  std::string dir;
  std::string csv;
  std::string json_out;
  int jobs = 1;
  int runs = 100;
};

int run_evaluate(const CorpusArgs& a, const tacsum::PipelineConfig& config) {
  checked(config);
  std::vector<std::string> missing;
  const auto corpus = scan_corpus(a.dir, true, missing);
  for (const auto& id : missing) std::cerr << "warning: skipping " << id << ": missing annotation or embedding\n";

  struct Row {
    bool ok = false;
    std::string error;
    double f = 0.0;
    std::size_t partitions = 0, keys = 0;
  };
  std::vector<Row> rows(corpus.size());
  parallel_for(corpus.size(), a.jobs, [&](std::size_t i) {
    try {
      const auto video = tacsum::load_annotation(corpus[i].annotation.string());
      const auto e = tacsum::load_tacemb(corpus[i].embedding.string());
      const auto ev = tacsum::evaluate_pipeline(video, e, config);
      rows[i] = Row{true, {}, ev.result.f_measure, ev.artifacts.summary.partitions.count(),
                    ev.artifacts.summary.keyframes.size()};
    } catch (const std::exception& err) {
      rows[i].error = err.what();
    }
  });

  std::ostringstream csv;
  csv << "video_id,f_measure,n_partitions,n_keyframes\n";
  json report;
  report["videos"] = json::array();
  double sum = 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = rows[i];
    if (!r.ok) {
      std::cerr << "error: " << corpus[i].id << ": " << r.error << '\n';
      continue;
    }
    csv << corpus[i].id << ',' << fmt_double(r.f) << ',' << r.partitions << ',' << r.keys << '\n';
    report["videos"].push_back(
        {{"video_id", corpus[i].id}, {"f_measure", r.f}, {"n_partitions", r.partitions}, {"n_keyframes", r.keys}});
    sum += r.f;
    ++ok;
  }
  const double mean = ok ? sum / static_cast<double>(ok) : 0.0;
  report["mean_f_measure"] = mean;
  report["config"] = config;

  if (a.csv.empty()) std::cout << csv.str();
  else write_text(a.csv, csv.str());
  if (!a.json_out.empty()) write_text(a.json_out, report.dump(2) + "\n");
  std::cout << "# mean_f_measure=" << fmt_double(mean) << " videos=" << ok << '\n';
  return ok == corpus.size() && missing.empty() ? 0 : kExitData;
}

// --- baseline --------------------------------------------------------------

int run_baseline(const CorpusArgs& a, const tacsum::PipelineConfig& config) {
  checked(config);
  std::vector<std::string> missing;
  auto corpus = scan_corpus(a.dir, false, missing);
  std::vector<double> f(corpus.size(), 0.0);
  std::vector<std::string> errors(corpus.size());
  parallel_for(corpus.size(), a.jobs, [&](std::size_t i) {
    try {
      const auto video = tacsum::load_annotation(corpus[i].annotation.string());
      f[i] = tacsum::random_baseline(video, config.budget, a.runs, config.seed + i, config.aggregation);
    } catch (const std::exception& err) {
      errors[i] = err.what();
    }
  });
  std::cout << "video_id,f_measure\n";
  double sum = 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: " << corpus[i].id << ": " << errors[i] << '\n';
      continue;
    }
    std::cout << corpus[i].id << ',' << fmt_double(f[i]) << '\n';
    sum += f[i];
    ++ok;
  }
  const double mean = ok ? sum / static_cast<double>(ok) : 0.0;
  std::cout << "# mean_f_measure=" << fmt_double(mean) << " videos=" << ok << " runs=" << a.runs << '\n';
  return ok == corpus.size() ? 0 : kExitData;
}

// --- inspect ---------------------------------------------------------------

struct InspectArgs {
  std::string input;
  std::string meta;
};

int run_inspect(const InspectArgs& a, const tacsum::PipelineConfig& config) {
  checked(config);
  json j;
  if (!a.input.empty()) {
    const auto e = tacsum::load_tacemb(a.input);
    const auto expected = tacsum::sample_indices(e.meta, e.map.rate);
    j["n_frames"] = e.meta.total_frames;
    j["fps"] = e.meta.fps;
    j["rate"] = e.map.rate;
    j["dim"] = e.dim();
    j["n_samples"] = e.rows();
    j["sample_indices"] = e.map.sample_indices;
    j["indices_match_rule"] = expected.sample_indices == e.map.sample_indices;
    j["target_k"] = tacsum::target_cluster_count(e.rows(), config.k_max, config.k_midpoint, config.k_scale);
    tacsum::PipelineConfig run = config;
    run.pca_dim = std::min<int>(run.pca_dim, static_cast<int>(e.dim()));
    if (run.pca_dim <= run.tsne_dim) throw tacsum::FormatError("embedding dimension too small for tsne_dim");
    const auto artifacts = tacsum::summarize(e, run);
    j["coarse_clusters"] = artifacts.clusters.coarse.num_clusters;
    j["partitions"] = tacsum::to_json(artifacts.summary.partitions);
  } else {
    if (a.meta.empty()) throw UsageError("inspect needs an embedding file or --meta T,fps");
    const auto comma = a.meta.find(',');
    if (comma == std::string::npos) throw UsageError("--meta expects T,fps");
    tacsum::VideoMeta meta;
    try {
      meta.total_frames = std::stoull(a.meta.substr(0, comma));
      meta.fps = std::stod(a.meta.substr(comma + 1));
    } catch (const std::exception&) {
      throw UsageError("--meta expects T,fps");
    }
    if (meta.total_frames < 1 || !(meta.fps > 0.0)) throw UsageError("--meta needs T >= 1 and fps > 0");
    const auto map = tacsum::sample_indices(meta, config.rate);
    j["n_frames"] = meta.total_frames;
    j["fps"] = meta.fps;
    j["rate"] = config.rate;
    j["n_samples"] = map.size();
    j["sample_indices"] = map.sample_indices;
    j["target_k"] = tacsum::target_cluster_count(map.size(), config.k_max, config.k_midpoint, config.k_scale);
  }
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free video summarization from per-frame embeddings"};
  app.require_subcommand(1);

  tacsum::PipelineConfig config;

  SummarizeArgs sum_args;
  auto* summarize = app.add_subcommand("summarize", "summarize one TACEMB file into keyframes and scores");
  summarize->add_option("embeddings", sum_args.input, "TACEMB file")->required();
  summarize->add_option("-o,--output", sum_args.output, "summary JSON path (default stdout)");
  summarize->add_option("--plot", sum_args.plot, "write an SVG score plot");
  summarize->add_option("--annotation", sum_args.annotation, "annotation JSON for knapsack segment selection");
  add_config_options(summarize, config);

  CorpusArgs corpus_args;
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a corpus of <id>.json + <id>.tacemb pairs");
  evaluate->add_option("corpus", corpus_args.dir, "corpus directory")->required();
  evaluate->add_option("--csv", corpus_args.csv, "write per-video CSV here instead of stdout");
  evaluate->add_option("--json", corpus_args.json_out, "write a JSON report");
  evaluate->add_option("-j,--jobs", corpus_args.jobs, "videos evaluated concurrently")->check(CLI::PositiveNumber);
  add_config_options(evaluate, config);

  auto* baseline = app.add_subcommand("baseline", "random-score baseline over a corpus");
  baseline->add_option("corpus", corpus_args.dir, "corpus directory")->required();
  baseline->add_option("--runs", corpus_args.runs, "sampling runs per video")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  baseline->add_option("-j,--jobs", corpus_args.jobs, "videos evaluated concurrently")->check(CLI::PositiveNumber);
  add_config_options(baseline, config);

  InspectArgs inspect_args;
  auto* inspect = app.add_subcommand("inspect", "print sample indices, target cluster count and partitions");
  inspect->add_option("embeddings", inspect_args.input, "TACEMB file");
  inspect->add_option("--meta", inspect_args.meta, "T,fps of a hypothetical video");
  add_config_options(inspect, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*summarize) return run_summarize(sum_args, config);
    if (*evaluate) return run_evaluate(corpus_args, config);
    if (*baseline) return run_baseline(corpus_args, config);
    if (*inspect) return run_inspect(inspect_args, config);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tacsum::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
