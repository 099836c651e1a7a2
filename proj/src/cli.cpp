/* Copyright 2026 The LGIP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "lgip/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgip/corpus.hpp"
#include "lgip/error.hpp"
#include "lgip/io.hpp"
#include "lgip/metrics.hpp"
#include "lgip/perturb.hpp"
#include "lgip/report.hpp"
#include "lgip/simstore.hpp"
#include "lgip/synthmodel.hpp"

namespace lgip {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One stage entry in <out-dir>/manifest.json. Each directory holds a single
// manifest; re-running a stage replaces its entry. Everything except the
// timestamps is covered by the stage digest.
class StageManifest {
 public:
  StageManifest(std::string stage, fs::path out_dir)
      : stage_(std::move(stage)), out_dir_(std::move(out_dir)), started_(utc_now()) {}

  ojson& config() { return config_; }
  void set_config_digest(std::string d) { config_digest_ = std::move(d); }

  void add_input(const fs::path& path) {
    inputs_.push_back({{"name", path.filename().string()}, {"sha256", sha256_file(path)}});
  }
  void add_output(const fs::path& path) {
    outputs_.push_back({{"name", path.filename().string()}, {"sha256", sha256_file(path)}});
  }

  void commit() {
    const fs::path path = out_dir_ / "manifest.json";
    ojson doc;
    if (fs::exists(path)) {
      try {
        std::ifstream in(path);
        doc = ojson::parse(in);
      } catch (const ojson::exception&) {
        doc = ojson();
      }
    }
    if (!doc.is_object()) doc = ojson::object();
    doc["tool"] = "lgip";
    doc["tool_version"] = kToolVersion;
    if (!doc.contains("stages") || !doc["stages"].is_object()) {
      doc["stages"] = ojson::object();
    }

    ojson entry;
    entry["config"] = config_;
    entry["config_digest"] = config_digest_;
    entry["inputs"] = inputs_;
    entry["outputs"] = outputs_;
    const std::string digest = sha256_hex(entry.dump());
    entry["digest"] = digest;
    entry["started_at"] = started_;
    entry["finished_at"] = utc_now();
    doc["stages"][stage_] = std::move(entry);

    AtomicFile file(path);
    file.stream() << doc.dump(2) << "\n";
    file.commit();
  }

 private:
  std::string stage_;
  fs::path out_dir_;
  std::string started_;
  ojson config_ = ojson::object();
  std::string config_digest_;
  ojson inputs_ = ojson::array();
  ojson outputs_ = ojson::array();
};

struct CommonFlags {
  std::string out_dir = ".";
  unsigned threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
  }

  fs::path prepare() const {
    fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kFileUnwritable, "cannot create " + out_dir);
    return dir;
  }
};

struct PerturbFlags {
  std::string vocab;
  std::string templates;
  std::size_t k_same = 6;
  std::size_t k_diff = 6;
  std::size_t min_chars = 10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--vocab", vocab, "Flip vocabulary JSON (default: built-in)");
    cmd->add_option("--templates", templates,
                    "Paraphrase templates, JSON array of strings (default: built-in)");
    cmd->add_option("--k-same", k_same, "Max paraphrases per caption")->capture_default_str();
    cmd->add_option("--k-diff", k_diff, "Max flips per caption")->capture_default_str();
    cmd->add_option("--min-chars", min_chars, "Minimum paraphrase length")
        ->capture_default_str();
  }

  PerturbConfig config() const {
    PerturbConfig c;
    c.k_same = k_same;
    c.k_diff = k_diff;
    c.min_chars = min_chars;
    c.templates = templates.empty() ? default_templates() : load_templates(templates);
    c.validate();
    return c;
  }

  FlipVocabulary vocabulary() const {
    auto v = vocab.empty() ? default_vocabulary() : load_vocabulary(vocab);
    v.validate();
    return v;
  }

  void record(StageManifest& m, const PerturbConfig& c, const FlipVocabulary& v) const {
    m.config()["k_same"] = c.k_same;
    m.config()["k_diff"] = c.k_diff;
    m.config()["min_chars"] = c.min_chars;
    m.config()["vocab"] = vocab.empty() ? "builtin" : fs::path(vocab).filename().string();
    m.config()["templates"] =
        templates.empty() ? "builtin" : fs::path(templates).filename().string();
    m.set_config_digest(perturb_config_digest(c, v));
  }
};

// ---------------------------------------------------------------------------

struct IngestCmd {
  std::string annotations;
  CorpusConfig config;
  CommonFlags common;

  void attach(CLI::App* cmd) {
    cmd->add_option("annotations", annotations, "COCO captions annotation file")
        ->required();
    cmd->add_option("--sample-size", config.sample_size, "Images to sample")
        ->capture_default_str();
    cmd->add_option("--captions-per-image", config.captions_per_image,
                    "Captions kept per image")
        ->capture_default_str();
    cmd->add_option("--seed", config.seed, "Sampling seed")->capture_default_str();
    cmd->add_option("--min-caption-chars", config.min_caption_chars,
                    "Drop captions shorter than this")
        ->capture_default_str();
    common.attach(cmd);
  }

  void run() {
    config.validate();
    const auto captions = sample_corpus(load_coco_captions(annotations), config);
    const auto dir = common.prepare();
    StageManifest manifest("ingest", dir);
    manifest.config()["sample_size"] = config.sample_size;
    manifest.config()["captions_per_image"] = config.captions_per_image;
    manifest.config()["seed"] = config.seed;
    manifest.config()["min_caption_chars"] = config.min_caption_chars;
    manifest.set_config_digest(sha256_hex(manifest.config().dump()));
    manifest.add_input(annotations);

    const auto out = dir / "corpus.jsonl";
    AtomicFile file(out);
    write_corpus_jsonl(file.stream(), captions);
    file.commit();
    manifest.add_output(out);
    manifest.commit();
  }
};

struct PerturbCmd {
  std::string corpus;
  PerturbFlags flags;
  CommonFlags common;

  void attach(CLI::App* cmd) {
    cmd->add_option("corpus", corpus, "corpus.jsonl from ingest")->required();
    flags.attach(cmd);
    common.attach(cmd);
  }

  void run() {
    const auto config = flags.config();
    const auto vocab = flags.vocabulary();
    const auto captions = read_corpus_jsonl(corpus);
    const auto dir = common.prepare();
    StageManifest manifest("perturb", dir);
    flags.record(manifest, config, vocab);
    manifest.add_input(corpus);
    if (!flags.vocab.empty()) manifest.add_input(flags.vocab);
    if (!flags.templates.empty()) manifest.add_input(flags.templates);

    const auto out = dir / "variants.jsonl";
    AtomicFile file(out);
    auto& stream = file.stream();
    perturb_corpus(
        captions, vocab, config,
        [&](const VariantRecord& r) { write_variant_line(stream, r); },
        common.threads);
    file.commit();
    manifest.add_output(out);
    manifest.commit();
  }
};

struct SynthCmd {
  std::string variants;
  std::string profile_name = "planted";
  SynthProfile profile;
  std::string templates;
  CommonFlags common;

  void attach(CLI::App* cmd) {
    cmd->add_option("variants", variants, "variants.jsonl from perturb")->required();
    cmd->add_option("--profile", profile_name, "planted | invariant | random")
        ->check(CLI::IsMember({"planted", "invariant", "random"}))
        ->capture_default_str();
    cmd->add_option("--planted-gap", profile.planted_gap, "Gap planted on every flip")
        ->capture_default_str();
    cmd->add_option("--dim", profile.dim, "Embedding dimension")->capture_default_str();
    cmd->add_option("--seed", profile.seed, "Generator seed")->capture_default_str();
    cmd->add_option("--templates", templates,
                    "Templates used to strip paraphrase affixes (invariant profile)");
    common.attach(cmd);
  }

  void run() {
    profile.kind = *parse_synth_kind(profile_name);
    profile.validate();
    const auto tmpls = templates.empty() ? default_templates() : load_templates(templates);
    const auto records = read_variants(variants);
    const auto tables = synth_embed(records, distinct_image_ids(records), profile, tmpls,
                                    common.threads);

    const auto dir = common.prepare();
    StageManifest manifest("synth", dir);
    manifest.config()["profile"] = profile_name;
    manifest.config()["dim"] = profile.dim;
    manifest.config()["seed"] = profile.seed;
    if (profile.kind == SynthKind::kPlanted) {
      manifest.config()["planted_gap"] = profile.planted_gap;
    }
    manifest.config()["templates"] = tmpls;
    manifest.set_config_digest(sha256_hex(manifest.config().dump()));
    manifest.add_input(variants);

    const auto images_path = dir / "images.lge1";
    const auto texts_path = dir / "texts.lge1";
    AtomicFile images(images_path, true);
    AtomicFile texts(texts_path, true);
    write_embeddings(images.stream(), tables.images);
    write_embeddings(texts.stream(), tables.texts);
    images.commit();
    texts.commit();
    manifest.add_output(images_path);
    manifest.add_output(texts_path);
    manifest.commit();
  }
};

struct ScoreCmd {
  std::string images;
  std::string texts;
  std::string variants;
  CommonFlags common;

  void attach(CLI::App* cmd) {
    cmd->add_option("images", images, "Image embeddings (LGE1)")->required();
    cmd->add_option("texts", texts, "Text embeddings (LGE1)")->required();
    cmd->add_option("variants", variants, "variants.jsonl")->required();
    common.attach(cmd);
  }

  void run() {
    const auto image_table = load_embeddings(images);
    const auto text_table = load_embeddings(texts);
    if (image_table.dim() != text_table.dim() && !image_table.empty() &&
        !text_table.empty()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "image dim " + std::to_string(image_table.dim()) + " vs text dim " +
                      std::to_string(text_table.dim()));
    }
    auto in = open_input(variants);
    VariantReader reader(in);

    const auto dir = common.prepare();
    StageManifest manifest("score", dir);
    manifest.config()["similarity"] = "cosine";
    manifest.set_config_digest(sha256_hex(manifest.config().dump()));
    manifest.add_input(images);
    manifest.add_input(texts);
    manifest.add_input(variants);

    const auto out = dir / "scores.jsonl";
    AtomicFile file(out);
    auto& stream = file.stream();
    score_stream(
        image_table, text_table, reader,
        [&](const SimilarityRecord& r) { write_score_line(stream, r); }, common.threads);
    file.commit();
    manifest.add_output(out);
    manifest.commit();
  }
};

struct MetricsCmd {
  std::string scores;
  std::string model_name = "model";
  std::string pooling = "flat";
  PerturbFlags flags;
  CommonFlags common;
  std::ostream* log = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("scores", scores, "scores.jsonl from score")->required();
    cmd->add_option("--model-name", model_name, "Name recorded in metrics.json")
        ->capture_default_str();
    cmd->add_option("--pooling", pooling,
                    "flat, or nested to also report per-caption averaging")
        ->check(CLI::IsMember({"flat", "nested"}))
        ->capture_default_str();
    flags.attach(cmd);
    common.attach(cmd);
  }

  void run() {
    const auto config = flags.config();
    const auto vocab = flags.vocabulary();
    const bool nested = *parse_pooling(pooling) == Pooling::kNested;

    auto in = open_input(scores);
    ScoreReader reader(in);
    GroupStream groups([&] { return reader.next(); });
    MetricsAccumulator flat_acc(Pooling::kFlat);
    MetricsAccumulator nested_acc(Pooling::kNested);
    while (auto g = groups.next()) {
      flat_acc.add(*g);
      if (nested) nested_acc.add(*g);
    }
    if (groups.dropped_groups() > 0 && log) {
      *log << "warning: dropped " << groups.dropped_groups()
                << " caption groups with no paraphrases or flips\n";
    }

    MetricsReport report;
    report.model_name = model_name;
    report.config_digest = perturb_config_digest(config, vocab);
    report.summary = flat_acc.summary();
    if (nested) report.nested = nested_acc.summary();
    report.n_dropped_groups = groups.dropped_groups();

    const auto dir = common.prepare();
    StageManifest manifest("metrics", dir);
    manifest.config()["model_name"] = model_name;
    manifest.config()["pooling"] = pooling;
    flags.record(manifest, config, vocab);
    manifest.add_input(scores);

    const auto out = dir / "metrics.json";
    AtomicFile file(out);
    write_metrics_json(file.stream(), report);
    file.commit();
    manifest.add_output(out);
    manifest.commit();
  }
};

struct ReportCmd {
  std::vector<std::string> metrics;
  CommonFlags common;

  void attach(CLI::App* cmd) {
    cmd->add_option("metrics", metrics, "metrics.json files, one per model")->required();
    common.attach(cmd);
  }

  void run() {
    std::vector<ModelRow> rows;
    for (const auto& path : metrics) rows.push_back(model_row(load_metrics_json(path)));
    check_unique_models(rows);

    const auto dir = common.prepare();
    StageManifest manifest("report", dir);
    manifest.config()["models"] = rows.size();
    manifest.set_config_digest(sha256_hex(manifest.config().dump()));
    for (const auto& path : metrics) manifest.add_input(path);

    const std::pair<const char*, std::string> files[] = {
        {"report.md", "## LGIP metrics\n\n" +
                          render_main_table(rows, TableStyle::kMarkdown) +
                          "\n## Flip-type breakdown\n\n" +
                          render_fliptype_table(rows, TableStyle::kMarkdown)},
        {"report.txt", render_main_table(rows, TableStyle::kPlain) + "\n" +
                           render_fliptype_table(rows, TableStyle::kPlain)},
        {"scatter.csv", emit_scatter_csv(rows)},
    };
    for (const auto& [name, body] : files) {
      AtomicFile file(dir / name);
      file.stream() << body;
      file.commit();
      manifest.add_output(dir / name);
    }
    manifest.commit();
  }
};

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Caption invariance and sensitivity probing for image-text models", "lgip"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  IngestCmd ingest;
  PerturbCmd perturb;
  SynthCmd synth;
  ScoreCmd score;
  MetricsCmd metrics;
  ReportCmd report;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load and sample COCO captions");
  auto* perturb_cmd = app.add_subcommand("perturb", "Generate paraphrases and flips");
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic LGE1 embeddings");
  auto* score_cmd = app.add_subcommand("score", "Score variants by cosine similarity");
  auto* metrics_cmd = app.add_subcommand("metrics", "Compute invariance/sensitivity metrics");
  auto* report_cmd = app.add_subcommand("report", "Render tables and scatter CSV");
  ingest.attach(ingest_cmd);
  perturb.attach(perturb_cmd);
  synth.attach(synth_cmd);
  score.attach(score_cmd);
  metrics.attach(metrics_cmd);
  report.attach(report_cmd);
  metrics.log = &err;

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_code_name(ErrorCode::kUsage) << ": " << one_line(e.what()) << "\n";
    return 1;
  }

  try {
    if (ingest_cmd->parsed()) ingest.run();
    else if (perturb_cmd->parsed()) perturb.run();
    else if (synth_cmd->parsed()) synth.run();
    else if (score_cmd->parsed()) score.run();
    else if (metrics_cmd->parsed()) metrics.run();
    else if (report_cmd->parsed()) report.run();
  } catch (const Error& e) {
    err << e.code_name() << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lgip
