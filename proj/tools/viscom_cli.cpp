// Command-line front end: ingest, build, export, stats and query.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viscom/viscom.hpp"

namespace {

using namespace viscom;

struct Options {
  std::string scene;
  std::string kb;
  std::string dataset;
  std::string lexicon = std::string(VISCOM_DATA_DIR) + "/lexicon";
  std::string config;
  std::string out;
  std::string name;
  std::string category;
  std::optional<double> tau;
  std::optional<std::uint32_t> m;
  std::optional<std::uint32_t> k;
  std::optional<std::uint32_t> j;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sep;
  unsigned workers = 1;
  bool keep_seen_duplicates = false;
};

ExportConfig load_config(const Options& o) {
  ExportConfig cfg = o.config.empty() ? ExportConfig{} : ExportConfig::from_file(o.config);
  if (o.tau) cfg.tau = *o.tau;
  if (o.m) cfg.m = *o.m;
  if (o.k) cfg.k = *o.k;
  if (o.j) cfg.j = *o.j;
  if (o.seed) cfg.seed = *o.seed;
  if (o.sep) cfg.sep_token = *o.sep;
  if (o.keep_seen_duplicates) cfg.dedup_unseen_against_seen = false;
  cfg.validate();
  return cfg;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::InvalidConfig, std::string(flag) + " is required");
}

// Writes through `fn` to --out, or to stdout when --out is empty.
template <typename Fn>
void emit(const std::string& out_path, Fn&& fn) {
  if (out_path.empty() || out_path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + out_path + " for writing");
  fn(out);
  out.flush();
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + out_path);
}

std::vector<DatasetRecord> build(const Options& o, const ExportConfig& cfg, bool with_seen, bool with_unseen) {
  require(o.scene, "--scene");
  if (with_unseen) require(o.kb, "--kb");
  const auto lex = Lexicon::load(o.lexicon);
  const auto corpus = load_scene_corpus(o.scene);
  std::optional<KbIndex> kb;
  if (with_unseen) kb = load_kb(o.kb);
  PipelineOptions opts;
  opts.tau = cfg.tau;
  opts.with_seen = with_seen;
  opts.with_unseen = with_unseen;
  opts.dedup_unseen_against_seen = cfg.dedup_unseen_against_seen;
  opts.workers = o.workers;
  auto result = run_pipeline(corpus, kb ? &*kb : nullptr, lex, opts);
  std::cerr << diagnostics_json(result.diagnostics) << '\n';
  return std::move(result.records);
}

// Records from --dataset when given, otherwise built from --scene and --kb.
std::vector<DatasetRecord> records_for(const Options& o, const ExportConfig& cfg) {
  if (!o.dataset.empty()) return import_dataset(o.dataset);
  return build(o, cfg, true, true);
}

void run_ingest(const Options& o) {
  require(o.scene, "--scene");
  auto corpus = load_scene_corpus(o.scene);
  nlohmann::ordered_json summary;
  summary["record"] = "corpus";
  summary["image_count"] = corpus.image_count();
  summary["bbox_count"] = corpus.bbox_count();
  if (!o.kb.empty()) summary["kb_edges"] = load_kb(o.kb).size();
  std::cerr << summary.dump() << '\n';
  if (!o.out.empty()) emit(o.out, [&](std::ostream& out) { write_scene_corpus(corpus, out); });
}

void run_stats(const Options& o, const ExportConfig& cfg) {
  auto stats = compute_stats(records_for(o, cfg));
  emit(o.out, [&](std::ostream& out) { write_stats(stats, out); });
}

void run_query(const Options& o) {
  require(o.dataset, "--dataset");
  require(o.name, "--name");
  require(o.category, "--category");
  const auto category = parse_category(o.category);
  const auto lex = Lexicon::load(o.lexicon);
  auto triples = query(import_dataset(o.dataset), o.name, category, lex);
  emit(o.out, [&](std::ostream& out) {
    for (const auto& t : triples) {
      out << text::escape_field(t.head_id) << '\t' << text::escape_field(t.head_name) << '\t' << t.category.str()
          << '\t' << text::escape_field(t.tail) << '\t' << name_of(t.provenance) << '\t'
          << text::format_double(t.score) << '\n';
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Visual commonsense dataset builder"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--lexicon", o.lexicon, "Lexicon directory")->capture_default_str();
    cmd->add_option("--config", o.config, "JSON file with export configuration overrides");
    cmd->add_option("--out", o.out, "Output path (stdout when omitted)");
    cmd->add_option("--tau", o.tau, "Localization threshold in (0, 1]");
    cmd->add_option("--m", o.m, "Seen tails sampled per object and category");
    cmd->add_option("--k", o.k, "Top-ranked unseen tails per object and category");
    cmd->add_option("--j", o.j, "Extra unseen tails sampled from the remainder");
    cmd->add_option("--seed", o.seed, "Sampling seed");
    cmd->add_option("--sep", o.sep, "Separator joining target tails");
    cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    cmd->add_flag("--keep-seen-duplicates", o.keep_seen_duplicates,
                  "Keep unseen triples that repeat a seen triple of the same object");
  };
  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--scene", o.scene, "Scene corpus file or directory");
    cmd->add_option("--kb", o.kb, "Knowledge-base edge file");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a scene corpus and report counts");
  auto* build_seen_cmd = app.add_subcommand("build-seen", "Build Seen triples into a dataset file");
  auto* build_unseen_cmd = app.add_subcommand("build-unseen", "Build Unseen triples into a dataset file");
  auto* export_cmd = app.add_subcommand("export", "Build Seen and Unseen triples into a dataset file");
  auto* stats = app.add_subcommand("stats", "Corpus statistics of a dataset");
  auto* instr = app.add_subcommand("export-instructions", "Instruction samples as JSON lines");
  auto* query_cmd = app.add_subcommand("query", "Triples of an object name in one category");
  for (auto* cmd : {ingest, build_seen_cmd, build_unseen_cmd, export_cmd, stats, instr, query_cmd}) add_common(cmd);
  for (auto* cmd : {ingest, build_seen_cmd, build_unseen_cmd, export_cmd, stats, instr}) add_inputs(cmd);
  for (auto* cmd : {stats, instr, query_cmd}) cmd->add_option("--dataset", o.dataset, "Dataset file from export");
  query_cmd->add_option("--name", o.name, "Object name");
  query_cmd->add_option("--category", o.category, "Category path, e.g. /Seen/Space/LocatedNear");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const ExportConfig cfg = load_config(o);
    if (*ingest) {
      run_ingest(o);
    } else if (*build_seen_cmd || *build_unseen_cmd || *export_cmd) {
      auto records = build(o, cfg, !*build_unseen_cmd, !*build_seen_cmd);
      emit(o.out, [&](std::ostream& out) { write_dataset(records, out); });
    } else if (*stats) {
      run_stats(o, cfg);
    } else if (*instr) {
      auto samples = build_all_instruction_samples(records_for(o, cfg), cfg, o.workers);
      emit(o.out, [&](std::ostream& out) { write_instruction_samples(samples, out); });
    } else if (*query_cmd) {
      run_query(o);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.is_input_error() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "InvariantViolation: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
