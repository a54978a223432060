#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hrlda/config.hpp"
#include "hrlda/corpus.hpp"
#include "hrlda/error.hpp"
#include "hrlda/evaluation.hpp"
#include "hrlda/hierarchy.hpp"
#include "hrlda/ontology.hpp"
#include "hrlda/triplets.hpp"

namespace hrlda::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[1 << 14];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

namespace {

struct ConfigFlags {
  std::string config_path;
  double alpha = 0, eta = 0, gamma = 0;
  int max_depth = 0, iterations = 0, acrp_max_passes = 0;
  std::uint64_t seed_rng = 0;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_eta = nullptr;
  CLI::Option* o_gamma = nullptr;
  CLI::Option* o_depth = nullptr;
  CLI::Option* o_iterations = nullptr;
  CLI::Option* o_passes = nullptr;
  CLI::Option* o_seed = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON or flat TOML config file (a run manifest also works)");
    o_alpha = app->add_option("--alpha", alpha, "Document-topic Dirichlet prior (default 1)");
    o_eta = app->add_option("--eta", eta, "Topic-relation Dirichlet prior (default 0.1)");
    o_gamma = app->add_option("--gamma", gamma, "ACRP penalty factor in (0,1) (default 0.01)");
    o_depth = app->add_option("--max-depth", max_depth, "Tree depth cap (default unlimited)");
    o_iterations = app->add_option("--iterations", iterations, "Gibbs sweeps per node (default 2000)");
    o_passes = app->add_option("--acrp-max-passes", acrp_max_passes, "ACRP pass cap (default 100)");
    o_seed = app->add_option("--seed-rng", seed_rng, "Run seed (default 0)");
  }

  CorpusConfig resolve() const {
    CorpusConfig c;
    if (!config_path.empty()) c = load_config(config_path, c);
    if (o_alpha->count()) c.alpha = alpha;
    if (o_eta->count()) c.eta = eta;
    if (o_gamma->count()) c.gamma = gamma;
    if (o_depth->count()) c.max_depth = max_depth;
    if (o_iterations->count()) c.gibbs_iterations = iterations;
    if (o_passes->count()) c.acrp_max_passes = acrp_max_passes;
    if (o_seed->count()) c.rng_seed = seed_rng;
    c.validate();
    return c;
  }
};

/// Collects what a run read and wrote, then writes `<output>.manifest.json`.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void config(const CorpusConfig& c) { config_ = to_json(c); }
  void input(const std::string& path) { inputs_[path] = file_digest(path); }
  void output(const std::string& path) { outputs_.push_back(path); }
  void setting(const std::string& key, json value) { settings_[key] = std::move(value); }

  template <typename F>
  auto stage(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      stages_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      finish();
    } else {
      auto result = body();
      finish();
      return result;
    }
  }

  void write_next_to(const std::string& output) const {
    json j;
    j["tool"] = "hrlda";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["settings"] = settings_;
    j["stage_seconds"] = stages_;
    write_text(output + ".manifest.json", j.dump(2) + "\n");
  }

  static void write_text(const std::string& path, const std::string& text) {
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("failed writing " + path);
  }

 private:
  std::string command_;
  json config_ = nullptr;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  json settings_ = json::object();
  std::map<std::string, double> stages_;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string fixed3(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << x;
  return out.str();
}

void print_report(std::ostream& out, const PrfReport& r) {
  out << "tp=" << r.true_positives << " fp=" << r.false_positives << " fn=" << r.false_negatives << "\n";
  out << "p=" << fixed3(r.precision) << " r=" << fixed3(r.recall) << " f=" << fixed3(r.f_measure) << "\n";
}

json report_json(const PrfReport& r) {
  return {{"true_positives", r.true_positives}, {"false_positives", r.false_positives},
          {"false_negatives", r.false_negatives}, {"precision", r.precision},
          {"recall", r.recall}, {"f_measure", r.f_measure}};
}

struct Inputs {
  std::string corpus;
  std::string lexicon;
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
};

std::optional<SynonymLexicon> maybe_lexicon(const std::string& path, Manifest& manifest) {
  if (path.empty()) return std::nullopt;
  manifest.input(path);
  return load_lexicon(path);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Terminological ontology extraction with hierarchical relation-based topic models", "hrlda"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // extract-triplets
  auto* extract = app.add_subcommand("extract-triplets", "Rule-based triplet extraction into a one-document corpus");
  std::string mode, extract_input, extract_out, doc_id;
  int spaces_per_level = 2;
  bool passive = false;
  extract->add_option("--mode", mode, "structural | pattern")->required()->check(CLI::IsMember({"structural", "pattern"}));
  extract->add_option("--input", extract_input, "Itemized text (structural) or one sentence per line (pattern)")
      ->required();
  extract->add_option("--out", extract_out, "Write the extracted document as JSONL corpus");
  extract->add_option("--doc-id", doc_id, "Document id (default: input file stem)");
  extract->add_option("--spaces-per-level", spaces_per_level, "Spaces per indent level when not using tabs");
  extract->add_flag("--passive", passive, "Also emit passive inversions (pattern mode)");

  // build
  auto* build = app.add_subcommand("build", "Build the topic tree");
  ConfigFlags build_cfg;
  Inputs build_in;
  std::string build_out, build_ontology_out;
  build_cfg.attach(build);
  build->add_option("--corpus", build_in.corpus, "JSONL corpus")->required();
  build->add_option("--lexicon", build_in.lexicon, "Synonym lexicon (JSON array of pairs)");
  build->add_option("--threads", build_in.threads, "Worker threads for sibling expansion");
  build->add_option("--out", build_out, "Tree JSON output")->required();
  build->add_option("--ontology-out", build_ontology_out, "Also write the linked ontology as JSON");

  // prune
  auto* prune_cmd = app.add_subcommand("prune", "Restrict a corpus to the triplet-graph neighbourhood of seeds");
  std::string prune_corpus_path, prune_out, prune_ontology_in, prune_ontology_out;
  std::vector<std::string> seeds;
  int steps = -1;
  prune_cmd->add_option("--corpus", prune_corpus_path, "JSONL corpus")->required();
  prune_cmd->add_option("--seed", seeds, "Seed phrase (repeatable)")->required();
  prune_cmd->add_option("--steps", steps, "BFS rounds (default: until exhaustion)");
  prune_cmd->add_option("--out", prune_out, "Pruned JSONL corpus output")->required();
  prune_cmd->add_option("--ontology", prune_ontology_in, "Also filter this ontology JSON post hoc");
  prune_cmd->add_option("--ontology-out", prune_ontology_out, "Where to write the filtered ontology");

  // export
  auto* export_cmd = app.add_subcommand("export", "Link relations to topic labels and serialize the ontology");
  ConfigFlags export_cfg;
  Inputs export_in;
  std::string tree_path, format = "json", export_out;
  bool synonym_subjects = false;
  export_cfg.attach(export_cmd);
  export_cmd->add_option("--corpus", export_in.corpus, "JSONL corpus")->required();
  export_cmd->add_option("--tree", tree_path, "Tree JSON from `build` (otherwise the tree is rebuilt)");
  export_cmd->add_option("--lexicon", export_in.lexicon, "Synonym lexicon (JSON array of pairs)");
  export_cmd->add_option("--threads", export_in.threads, "Worker threads when rebuilding the tree");
  export_cmd->add_option("--format", format, "json | turtle")->check(CLI::IsMember({"json", "turtle"}));
  export_cmd->add_flag("--synonym-subjects", synonym_subjects, "Attach triplets whose subject is a synonym of a label");
  export_cmd->add_option("--out", export_out, "Output path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score an ontology against gold rules, or report perplexity");
  ConfigFlags eval_cfg;
  Inputs eval_in;
  std::string gold_path, ontology_path, eval_out;
  bool eval_json = false, eval_perplexity = false;
  eval_cfg.attach(eval);
  eval->add_option("--gold", gold_path, "Gold rules (JSON array of 3-string tuples)");
  eval->add_option("--ontology", ontology_path, "Ontology JSON from `export`");
  eval->add_flag("--json", eval_json, "Also print the report as JSON");
  eval->add_flag("--perplexity", eval_perplexity, "Per-level perplexity of a fresh build of --corpus");
  eval->add_option("--corpus", eval_in.corpus, "JSONL corpus (with --perplexity)");
  eval->add_option("--lexicon", eval_in.lexicon, "Synonym lexicon (JSON array of pairs)");
  eval->add_option("--threads", eval_in.threads, "Worker threads for the build");
  eval->add_option("--out", eval_out, "CSV of root perplexity per sweep (with --perplexity)");

  // all
  auto* all = app.add_subcommand("all", "prune (optional) -> build -> export -> eval (optional)");
  ConfigFlags all_cfg;
  Inputs all_in;
  std::string all_out, all_gold;
  std::vector<std::string> all_seeds;
  int all_steps = -1;
  all_cfg.attach(all);
  all->add_option("--corpus", all_in.corpus, "JSONL corpus")->required();
  all->add_option("--lexicon", all_in.lexicon, "Synonym lexicon (JSON array of pairs)");
  all->add_option("--threads", all_in.threads, "Worker threads");
  all->add_option("--seed", all_seeds, "Seed phrase for pruning (repeatable)");
  all->add_option("--steps", all_steps, "BFS rounds for pruning");
  all->add_option("--gold", all_gold, "Gold rules to score against");
  all->add_option("--out", all_out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "hrlda: " << e.what() << "\n";
    return 1;
  }

  try {
    if (extract->parsed()) {
      Manifest manifest("extract-triplets");
      manifest.input(extract_input);
      std::ifstream in(extract_input);
      if (!in) throw DataError("cannot open input file: " + extract_input);
      const std::string id = doc_id.empty() ? fs::path(extract_input).stem().string() : doc_id;
      std::vector<RelationTriplet> triplets;
      Corpus document;
      if (mode == "structural") {
        auto result = extract_structural_triplets(parse_itemized(in, id, spaces_per_level));
        triplets = std::move(result.triplets);
        document = std::move(result.document);
      } else {
        std::vector<std::string> sentences;
        for (std::string line; std::getline(in, line);) sentences.push_back(line);
        document = pattern_document(sentences, id, {}, passive);
        for (const auto& s : sentences) {
          for (auto& t : extract_pattern_triplets(s, {}, id)) {
            if (passive) {
              try {
                auto inverse = passive_inverse(t);
                triplets.push_back(std::move(t));
                triplets.push_back(std::move(inverse));
                continue;
              } catch (const DataError&) {
              }
            }
            triplets.push_back(std::move(t));
          }
        }
      }
      for (const auto& t : triplets) out << t.subject() << '\t' << t.verb() << '\t' << t.object() << '\n';
      if (!extract_out.empty()) {
        Manifest::write_text(extract_out, corpus_to_jsonl(document));
        manifest.output(extract_out);
        manifest.setting("mode", mode);
        manifest.setting("passive", passive);
        manifest.write_next_to(extract_out);
      }
      return 0;
    }

    if (build->parsed()) {
      Manifest manifest("build");
      const auto config = build_cfg.resolve();
      manifest.config(config);
      manifest.input(build_in.corpus);
      const auto lexicon = maybe_lexicon(build_in.lexicon, manifest);
      const auto corpus = manifest.stage("load", [&] { return load_corpus(build_in.corpus, config); });
      const auto tree = manifest.stage("build", [&] {
        return build_tree(corpus, config, {build_in.threads, lexicon ? &*lexicon : nullptr});
      });
      Manifest::write_text(build_out, tree_to_string(tree, corpus));
      manifest.output(build_out);
      if (!build_ontology_out.empty()) {
        Manifest::write_text(build_ontology_out,
                             export_ontology(link_relations(tree, corpus), ExportFormat::json) + "\n");
        manifest.output(build_ontology_out);
      }
      manifest.write_next_to(build_out);
      out << "built tree: depth " << tree.depth << ", " << tree.root.children.size() << " top-level topics, "
          << corpus.size() << " tokens\n";
      return 0;
    }

    if (prune_cmd->parsed()) {
      Manifest manifest("prune");
      manifest.input(prune_corpus_path);
      const auto corpus = load_corpus(prune_corpus_path);
      std::set<std::string> normalized;
      for (const auto& s : seeds) normalized.insert(normalize_phrase(s));
      const std::optional<int> step_cap = steps < 0 ? std::nullopt : std::optional(steps);
      const auto kept = manifest.stage("prune", [&] { return prune(build_triplet_graph(corpus), normalized, step_cap); });
      const auto pruned = prune_corpus(corpus, kept);
      Manifest::write_text(prune_out, corpus_to_jsonl(pruned));
      manifest.output(prune_out);
      if (!prune_ontology_in.empty()) {
        if (prune_ontology_out.empty()) throw CLI::RequiredError("--ontology-out");
        manifest.input(prune_ontology_in);
        const auto filtered = filter_ontology(ontology_from_json(read_text(prune_ontology_in)), kept.phrases);
        Manifest::write_text(prune_ontology_out, export_ontology(filtered, ExportFormat::json) + "\n");
        manifest.output(prune_ontology_out);
      }
      manifest.setting("seeds", std::vector<std::string>(normalized.begin(), normalized.end()));
      manifest.setting("steps", step_cap ? json(*step_cap) : json(nullptr));
      manifest.write_next_to(prune_out);
      out << "kept " << kept.phrases.size() << " phrases, " << kept.triplets.size() << " triplets, "
          << pruned.size() << " tokens\n";
      return 0;
    }

    if (export_cmd->parsed()) {
      Manifest manifest("export");
      const auto config = export_cfg.resolve();
      manifest.config(config);
      manifest.input(export_in.corpus);
      const auto lexicon = maybe_lexicon(export_in.lexicon, manifest);
      const auto corpus = load_corpus(export_in.corpus, config);
      TopicTree tree;
      if (!tree_path.empty()) {
        manifest.input(tree_path);
        try {
          tree = tree_from_json(json::parse(read_text(tree_path)));
        } catch (const json::parse_error& e) {
          throw DataError(tree_path + ": " + e.what());
        }
      } else {
        tree = manifest.stage("build", [&] {
          return build_tree(corpus, config, {export_in.threads, lexicon ? &*lexicon : nullptr});
        });
      }
      LinkReport report;
      const auto ontology = link_relations(tree, corpus, {synonym_subjects, lexicon ? &*lexicon : nullptr}, &report);
      std::string text = export_ontology(ontology, export_format_from_string(format));
      if (format == "json") text += "\n";
      Manifest::write_text(export_out, text);
      manifest.output(export_out);
      manifest.setting("format", format);
      manifest.setting("synonym_subjects", synonym_subjects);
      manifest.write_next_to(export_out);
      out << ontology.classes.size() << " classes, " << ontology.subclass_edges.size() << " subclass edges, "
          << ontology.assertions.size() << " assertions (" << report.dropped << " triplets without a matching label)\n";
      return 0;
    }

    if (eval->parsed()) {
      if (!eval_perplexity && (gold_path.empty() || ontology_path.empty())) {
        err << "hrlda eval: need --gold and --ontology, or --perplexity with --corpus\n";
        return 1;
      }
      if (eval_perplexity && eval_in.corpus.empty()) {
        err << "hrlda eval: --perplexity needs --corpus\n";
        return 1;
      }
      json report = json::object();
      Manifest manifest("eval");
      if (!gold_path.empty() && !ontology_path.empty()) {
        manifest.input(gold_path);
        manifest.input(ontology_path);
        const auto r = compare_gold(ontology_from_json(read_text(ontology_path)), load_gold(gold_path));
        print_report(out, r);
        report["gold"] = report_json(r);
      }
      if (eval_perplexity) {
        const auto config = eval_cfg.resolve();
        manifest.config(config);
        manifest.input(eval_in.corpus);
        const auto lexicon = maybe_lexicon(eval_in.lexicon, manifest);
        const auto corpus = load_corpus(eval_in.corpus, config);
        const auto tree = manifest.stage("build", [&] {
          return build_tree(corpus, config, {eval_in.threads, lexicon ? &*lexicon : nullptr});
        });
        json levels = json::array();
        for (const auto& level : level_perplexities(tree)) {
          out << "level " << level.level << ": perplexity " << fixed3(level.perplexity) << " over " << level.tokens
              << " tokens\n";
          levels.push_back({{"level", level.level}, {"tokens", level.tokens}, {"perplexity", level.perplexity}});
        }
        report["levels"] = std::move(levels);
        if (tree.root.split) {
          const double aggregate = aggregate_perplexity(tree);
          out << "aggregate: perplexity " << fixed3(aggregate) << "\n";
          report["aggregate"] = aggregate;
        }
        if (!eval_out.empty()) {
          const auto trace = manifest.stage("trace", [&] {
            return root_perplexity_trace(corpus, config, lexicon ? &*lexicon : nullptr);
          });
          std::ostringstream csv;
          csv << "sweep,perplexity\n" << std::setprecision(17);
          for (std::size_t i = 0; i < trace.size(); ++i) csv << i << ',' << trace[i] << '\n';
          Manifest::write_text(eval_out, csv.str());
          manifest.output(eval_out);
          manifest.write_next_to(eval_out);
        }
      }
      if (eval_json) out << report.dump(2) << "\n";
      return 0;
    }

    if (all->parsed()) {
      Manifest manifest("all");
      const auto config = all_cfg.resolve();
      manifest.config(config);
      manifest.input(all_in.corpus);
      const auto lexicon = maybe_lexicon(all_in.lexicon, manifest);
      const SynonymLexicon* lex = lexicon ? &*lexicon : nullptr;
      auto corpus = manifest.stage("load", [&] { return load_corpus(all_in.corpus, config); });
      const fs::path dir(all_out);
      if (!all_seeds.empty()) {
        std::set<std::string> normalized;
        for (const auto& s : all_seeds) normalized.insert(normalize_phrase(s));
        const std::optional<int> cap = all_steps < 0 ? std::nullopt : std::optional(all_steps);
        corpus = manifest.stage("prune", [&] {
          return prune_corpus(corpus, prune(build_triplet_graph(corpus), normalized, cap));
        });
        Manifest::write_text((dir / "pruned.jsonl").string(), corpus_to_jsonl(corpus));
        manifest.output((dir / "pruned.jsonl").string());
        if (corpus.empty()) throw DataError("pruning left no tokens");
      }
      const auto tree = manifest.stage("build", [&] { return build_tree(corpus, config, {all_in.threads, lex}); });
      Manifest::write_text((dir / "tree.json").string(), tree_to_string(tree, corpus));
      const auto ontology = link_relations(tree, corpus);
      Manifest::write_text((dir / "ontology.json").string(), export_ontology(ontology, ExportFormat::json) + "\n");
      Manifest::write_text((dir / "ontology.ttl").string(), export_ontology(ontology, ExportFormat::turtle));
      for (const char* name : {"tree.json", "ontology.json", "ontology.ttl"}) manifest.output((dir / name).string());
      if (!all_gold.empty()) {
        manifest.input(all_gold);
        const auto r = compare_gold(ontology, load_gold(all_gold));
        print_report(out, r);
        Manifest::write_text((dir / "report.json").string(), report_json(r).dump(2) + "\n");
        manifest.output((dir / "report.json").string());
      }
      manifest.write_next_to((dir / "run").string());
      out << "wrote " << dir.string() << ": depth " << tree.depth << ", " << ontology.classes.size() << " classes\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    err << "hrlda: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "hrlda: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "hrlda: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace hrlda::cli
