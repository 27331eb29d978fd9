// nspmine: negative sequential pattern mining and classification pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "nspmine/error.hpp"
#include "nspmine/experiment.hpp"
#include "nspmine/fetch.hpp"
#include "nspmine/parallel.hpp"
#include "nspmine/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

bool g_quiet = false;

void info(const std::string& msg) {
  if (!g_quiet) std::cerr << msg << '\n';
}

std::string version_string() {
  return std::string("nspmine ") + NSPMINE_VERSION + " (" + NSPMINE_BUILD_TYPE + ", " +
         NSPMINE_COMPILER + ")";
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw nsp::IoError("cannot write " + p.string());
  return out;
}


nsp::Corpus read_corpora(const std::vector<std::string>& paths) {
  nsp::Corpus corpus;
  for (const auto& p : paths) {
    const nsp::Corpus part = nsp::read_encoded_files(p);
    for (const auto& s : part.sequences()) corpus.add(s);
  }
  return corpus;
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw nsp::IoError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw nsp::ConfigError(p.string() + ": " + e.what());
  }
}

void write_snapshot(const CLI::App& app, const fs::path& dir, const std::string& name) {
  auto out = open_out(dir / name);
  out << app.config_to_str(true, false);
}

// ---- encode ---------------------------------------------------------------

struct EncodeArgs {
  std::string fasta, label, out;
  bool map_u_to_t = false;
  bool drop_redundant = false;
};

int cmd_encode(const EncodeArgs& a) {
  const nsp::SymbolTable table(a.map_u_to_t);
  const auto records = nsp::read_fasta_file(a.fasta, table);
  nsp::Corpus corpus;
  std::size_t dropped = 0;
  for (const auto& r : records) {
    auto seq = nsp::encode_sequence(r, table, a.label);
    if (a.drop_redundant && nsp::has_redundant_codes(seq)) {
      ++dropped;
      continue;
    }
    corpus.add(std::move(seq));
  }
  nsp::write_encoded_files(corpus, a.out);
  info("encoded " + std::to_string(corpus.size()) + " sequences (" + std::to_string(dropped) +
       " dropped) -> " + a.out);
  return kOk;
}

// ---- fetch ----------------------------------------------------------------

struct FetchArgs {
  std::string accessions, endpoint, cache = "fetch_cache", out;
  bool map_u_to_t = false;
};

int cmd_fetch(const FetchArgs& a) {
  std::string endpoint = a.endpoint;
  if (endpoint.empty()) {
    if (const char* env = std::getenv(nsp::kFetchEndpointEnv)) endpoint = env;
  }
  if (endpoint.empty()) {
    throw nsp::ConfigError(std::string("no endpoint: pass --endpoint or set ") +
                           nsp::kFetchEndpointEnv);
  }
  std::ifstream in(a.accessions);
  if (!in) throw nsp::IoError("cannot open " + a.accessions);
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(b, e - b + 1));
  }
  const nsp::SymbolTable table(a.map_u_to_t);
  const auto result = nsp::fetch_accessions(ids, endpoint, a.cache, table);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    nsp::write_fasta(out, result.records);
  }
  info("fetched " + std::to_string(result.records.size()) + " records, " +
       std::to_string(result.network_requests) + " requests, " +
       std::to_string(result.cache_hits) + " cache hits");
  for (const auto& f : result.failures) std::cerr << "failed " << f.accession << ": " << f.reason << '\n';
  return result.failures.empty() ? kOk : kData;
}

// ---- mine -----------------------------------------------------------------

struct MineArgs {
  std::vector<std::string> in;
  std::string mode = "gonpm-plus";
  double minsup = 2.0;
  bool relative = false;
  std::vector<std::size_t> gap{0, 3};
  std::optional<double> ratio;
  std::vector<double> decay;
  std::optional<std::size_t> max_level;
  std::optional<std::size_t> max_patterns;
  std::string label;
  std::string out, tokens, stats;
};

nsp::MiningPlan mining_plan_from(const MineArgs& a) {
  nsp::MiningPlan plan;
  plan.mode = nsp::parse_mining_mode(a.mode);
  plan.name = nsp::to_string(plan.mode);
  plan.minsup = a.minsup;
  plan.relative = a.relative;
  plan.gap = {a.gap.at(0), a.gap.at(1)};
  if (a.ratio && plan.mode != nsp::MiningMode::gonpm) {
    throw nsp::ConfigError("--ratio only applies to --mode gonpm");
  }
  if (!a.decay.empty() && plan.mode != nsp::MiningMode::gonpm_plus) {
    throw nsp::ConfigError("--decay only applies to --mode gonpm-plus");
  }
  plan.ratio = a.ratio;
  if (!a.decay.empty()) plan.decay = a.decay;
  plan.max_level = a.max_level;
  plan.max_patterns = a.max_patterns;
  plan.resolve(1, "");  // validates before any work
  return plan;
}

json stats_json(const nsp::MiningResult& r, const nsp::MiningConfig& cfg) {
  json levels = json::array();
  for (const auto& s : r.stats.levels) {
    levels.push_back({{"level", s.level},
                      {"threshold", s.threshold},
                      {"positive_candidates", s.positive_candidates},
                      {"negative_candidates", s.negative_candidates},
                      {"pruned_negatives", s.pruned_negatives},
                      {"evaluated", s.evaluated},
                      {"frequent", s.frequent},
                      {"truncated", s.truncated},
                      {"seconds", s.seconds}});
  }
  return {{"mode", nsp::to_string(cfg.mode)},
          {"base_minsup", cfg.schedule.base()},
          {"patterns", r.pattern_count()},
          {"total_candidates", r.stats.total_candidates},
          {"max_pattern_length", r.stats.max_pattern_length},
          {"database_length", r.stats.database_length},
          {"seconds", r.stats.seconds},
          {"levels", levels}};
}

int cmd_mine(const MineArgs& a) {
  const nsp::MiningPlan plan = mining_plan_from(a);
  nsp::Corpus corpus = read_corpora(a.in);
  if (!a.label.empty()) {
    corpus = corpus.with_label(a.label);
    if (corpus.empty()) throw nsp::DataError("no sequences with class '" + a.label + "'");
  }
  const auto results = nsp::mine_per_class(corpus, plan);
  auto out = open_out(a.out);
  for (const auto& [label, r] : results) nsp::write_patterns(out, r, label);
  if (!a.tokens.empty()) {
    auto tok = open_out(a.tokens);
    for (const auto& [label, r] : results) nsp::write_pattern_tokens(tok, r);
  }
  json stats = json::object();
  for (const auto& [label, r] : results) {
    const auto cfg = plan.resolve(corpus.with_label(label).size(), label);
    stats[label] = stats_json(r, cfg);
    info(label + ": " + std::to_string(r.pattern_count()) + " patterns, minsup " +
         std::to_string(cfg.schedule.base()));
  }
  if (!a.stats.empty()) {
    auto s = open_out(a.stats);
    s << stats.dump(2) << '\n';
  }
  return kOk;
}

// ---- featurize ------------------------------------------------------------

struct FeaturizeArgs {
  std::vector<std::string> patterns, in;
  std::size_t min_length = 4;
  std::vector<std::size_t> cap{300, 600};
  bool allow_undersized = false;
  std::string normalize = "none";
  std::string out, catalog;
};

int cmd_featurize(const FeaturizeArgs& a) {
  nsp::SelectionParams sel;
  sel.min_length = a.min_length;
  sel.cap_min = a.cap.at(0);
  sel.cap_max = a.cap.at(1);
  if (sel.cap_min > sel.cap_max) throw nsp::ConfigError("--cap minimum exceeds maximum");
  sel.allow_undersized = a.allow_undersized;
  const auto norm = a.normalize == "length" ? nsp::Normalization::length : nsp::Normalization::none;

  std::vector<nsp::PatternLine> lines;
  for (const auto& p : a.patterns) {
    std::ifstream in(p);
    if (!in) throw nsp::IoError("cannot open " + p);
    auto more = nsp::read_pattern_lines(in);
    lines.insert(lines.end(), more.begin(), more.end());
  }
  const auto catalog = nsp::select_patterns(nsp::results_from_lines(lines), sel);
  const nsp::Corpus corpus = read_corpora(a.in);
  const auto matrix = nsp::featurize(corpus, catalog, norm);
  auto out = open_out(a.out);
  nsp::write_matrix(out, matrix);
  if (!a.catalog.empty()) {
    auto c = open_out(a.catalog);
    nsp::write_catalog(c, catalog);
  }
  info("matrix " + std::to_string(matrix.rows()) + " x " + std::to_string(matrix.cols()) +
       " -> " + a.out);
  return kOk;
}

// ---- train-eval -----------------------------------------------------------

struct TrainEvalArgs {
  std::string matrix;
  std::vector<std::string> classifiers{"lr", "knn", "nb", "dt", "rf"};
  double split = 0.8;
  std::size_t cv = 0;
  bool standardize = false;
  std::string out;
};

int cmd_train_eval(const TrainEvalArgs& a, std::uint64_t seed, const CLI::App& root) {
  if (!(a.split > 0 && a.split < 1)) throw nsp::ConfigError("--split expects a train fraction in (0, 1)");
  if (a.cv == 1) throw nsp::ConfigError("--cv needs at least 2 folds");
  for (const auto& c : a.classifiers) {
    if (!nsp::is_unimplemented_classifier(c)) nsp::parse_model_kind(c);
  }
  std::ifstream in(a.matrix);
  if (!in) throw nsp::IoError("cannot open " + a.matrix);
  const auto m = nsp::read_matrix(in);
  const auto classes = m.class_list();
  if (classes.size() < 2) throw nsp::DataError("matrix needs at least two classes");

  const fs::path dir = a.out;
  fs::create_directories(dir);
  write_snapshot(root, dir, "config.snapshot");
  const auto main_split = nsp::split(m.row_labels, 1.0 - a.split, seed);
  const auto folds = a.cv ? nsp::kfold(m.row_labels, a.cv, seed) : std::vector<nsp::DataSplit>{};

  auto hex = [](const nsp::DataSplit& s) {
    std::ostringstream h;
    h << std::hex << nsp::split_hash(s);
    return h.str();
  };
  auto fit_eval = [&](const std::string& name, const nsp::DataSplit& s,
                      std::optional<nsp::TrainedModel>* keep) {
    nsp::ModelSpec spec = nsp::ModelSpec::defaults(nsp::parse_model_kind(name));
    spec.standardize = a.standardize;
    spec.seed = nsp::derive_seed(seed, "model/" + name);
    auto model = nsp::train(spec, m, s.train_rows);
    const auto raw = nsp::predict_proba(model, m, s.test_rows);
    nsp::ProbaMatrix proba;
    for (const auto& row : raw) {
      std::vector<double> full(classes.size(), 0.0);
      for (std::size_t c = 0; c < row.size(); ++c) {
        const auto pos = std::find(classes.begin(), classes.end(), model.classes()[c]);
        full[static_cast<std::size_t>(pos - classes.begin())] = row[c];
      }
      proba.push_back(std::move(full));
    }
    std::vector<std::string> truth;
    for (std::size_t r : s.test_rows) truth.push_back(m.row_labels[r]);
    auto report = nsp::evaluate(name, truth, proba, classes);
    if (keep) keep->emplace(std::move(model));
    return report;
  };

  json summary{{"seed", seed},
               {"split_hash", hex(main_split)},
               {"accuracy", json::object()},
               {"not_implemented", json::array()}};
  for (const auto& name : a.classifiers) {
    if (nsp::is_unimplemented_classifier(name)) {
      std::cerr << "classifier " << name << " is not implemented in this build; skipped\n";
      summary["not_implemented"].push_back(name);
      continue;
    }
    std::optional<nsp::TrainedModel> model;
    const auto report = fit_eval(name, main_split, &model);
    json mj = nsp::metrics_to_json(report);
    mj["seed"] = seed;
    mj["split_hash"] = hex(main_split);
    mj["n_train"] = main_split.train_rows.size();
    mj["n_test"] = main_split.test_rows.size();
    mj["features"] = m.cols();
    if (!folds.empty()) {
      std::vector<double> acc;
      for (const auto& f : folds) acc.push_back(fit_eval(name, f, nullptr).prf.accuracy);
      double mean = 0, var = 0;
      for (double x : acc) mean += x;
      mean /= static_cast<double>(acc.size());
      for (double x : acc) var += (x - mean) * (x - mean);
      mj["cv"] = {{"folds", acc.size()},
                  {"accuracy", acc},
                  {"mean", mean},
                  {"std", std::sqrt(var / static_cast<double>(acc.size()))}};
    }
    auto mout = open_out(dir / "models" / (name + ".model"));
    model->save(mout);
    auto jout = open_out(dir / "metrics" / (name + ".json"));
    jout << mj.dump(2) << '\n';
    summary["accuracy"][name] = report.prf.accuracy;
    info(name + ": accuracy " + std::to_string(report.prf.accuracy));
  }
  auto sout = open_out(dir / "summary.json");
  sout << summary.dump(2) << '\n';
  return kOk;
}

// ---- synth / run / report -------------------------------------------------

int cmd_synth(const std::string& spec_path, const std::string& out, std::optional<std::uint64_t> seed,
              const CLI::App& root) {
  auto spec = nsp::synth_spec_from_json(read_json_file(spec_path));
  if (seed) spec.seed = *seed;
  const auto corpus = nsp::generate(spec);
  const fs::path dir = out;
  fs::create_directories(dir);
  write_snapshot(root, dir, "config.snapshot");
  {
    auto s = open_out(dir / "spec.json");
    s << nsp::synth_spec_to_json(spec).dump(2) << '\n';
  }
  nsp::write_encoded_files(corpus, dir / "corpus.txt");
  for (const auto& label : corpus.labels()) {
    nsp::write_encoded_files(corpus.with_label(label), dir / (label + ".txt"));
  }
  info("generated " + std::to_string(corpus.size()) + " sequences -> " + out);
  return kOk;
}

int cmd_run(const std::string& plan_path, const std::string& out, std::optional<std::uint64_t> seed,
            const CLI::App& root) {
  json j = read_json_file(plan_path);
  // Encoded inputs are relative to the plan file.
  if (j.contains("corpus") && j["corpus"].contains("encoded")) {
    const fs::path base = fs::path(plan_path).parent_path();
    for (auto& p : j["corpus"]["encoded"]) {
      const fs::path path = p.get<std::string>();
      if (path.is_relative()) p = (base / path).string();
    }
  }
  auto plan = nsp::plan_from_json(j);
  if (seed) plan.seed = *seed;
  fs::create_directories(out);
  write_snapshot(root, out, "cli.snapshot");
  const auto comparison = nsp::run_experiment(plan, out);
  for (const auto& entry : comparison.at("aai")) {
    if (entry.at("aai_percent").is_null()) continue;
    info("AAI " + entry.at("new").get<std::string>() + " vs " + entry.at("base").get<std::string>() +
         ": " + std::to_string(entry.at("aai_percent").get<double>()) + "%");
  }
  info("run written to " + out);
  return kOk;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& out) {
  std::vector<fs::path> dirs(runs.begin(), runs.end());
  const auto report = nsp::build_report(dirs);
  auto o = open_out(out);
  o << report.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negative sequential pattern mining for sequence classification", "nspmine"};
  app.set_version_flag("--version", version_string());
  app.set_config("--config", "", "key=value configuration file (flags take precedence)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  unsigned threads = 0;
  app.add_option("--seed", seed, "Global random seed")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("--quiet", g_quiet, "Suppress progress messages");

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode a FASTA file into the token format");
  encode->add_option("--fasta", enc.fasta, "Input FASTA")->required();
  encode->add_option("--label", enc.label, "Class label for every record")->required();
  encode->add_option("--out", enc.out, "Encoded output (manifest written alongside)")->required();
  encode->add_flag("--map-u-to-t", enc.map_u_to_t, "Read U as T");
  encode->add_flag("--drop-redundant", enc.drop_redundant, "Drop records with ambiguity codes");

  FetchArgs fa;
  auto* fetch = app.add_subcommand("fetch", "Download FASTA records by accession");
  fetch->add_option("--accessions", fa.accessions, "File with one accession per line")->required();
  fetch->add_option("--endpoint", fa.endpoint, "Endpoint URL (default from NSPMINE_FETCH_ENDPOINT)");
  fetch->add_option("--cache", fa.cache, "Cache directory")->capture_default_str();
  fetch->add_option("--out", fa.out, "Also write all records to one FASTA file");
  fetch->add_flag("--map-u-to-t", fa.map_u_to_t, "Read U as T");

  MineArgs ma;
  auto* mine = app.add_subcommand("mine", "Mine frequent patterns per class");
  mine->add_option("--in", ma.in, "Encoded corpus files")->required();
  mine->add_option("--mode", ma.mode, "onp-miner | gonpm | gonpm-plus | positive-only")
      ->capture_default_str();
  mine->add_option("--minsup", ma.minsup, "Base minimum support")->capture_default_str();
  mine->add_flag("--relative", ma.relative, "Read --minsup per sequence: multiplied by the class size");
  mine->add_option("--gap", ma.gap, "Gap constraint M,N")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  mine->add_option("--ratio", ma.ratio, "gonpm threshold ratio (default 1.3)");
  mine->add_option("--decay", ma.decay, "gonpm-plus decay factors f2,f3,...")->delimiter(',');
  mine->add_option("--max-level", ma.max_level, "Longest pattern length");
  mine->add_option("--max-patterns", ma.max_patterns, "Cap on patterns per class");
  mine->add_option("--class", ma.label, "Mine only this class");
  mine->add_option("--out", ma.out, "Pattern file")->required();
  mine->add_option("--tokens", ma.tokens, "Also write the token form of each pattern");
  mine->add_option("--stats", ma.stats, "Per-level statistics as JSON");

  FeaturizeArgs fz;
  auto* featurize = app.add_subcommand("featurize", "Select patterns and build the feature matrix");
  featurize->add_option("--patterns", fz.patterns, "Pattern files")->required();
  featurize->add_option("--in", fz.in, "Encoded corpus files")->required();
  featurize->add_option("--min-length", fz.min_length, "Shortest kept pattern")->capture_default_str();
  featurize->add_option("--cap", fz.cap, "Per-class pattern cap MIN,MAX")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  featurize->add_flag("--allow-undersized", fz.allow_undersized, "Accept classes below the cap minimum");
  featurize->add_option("--normalize", fz.normalize, "none | length")
      ->check(CLI::IsMember({"none", "length"}))
      ->capture_default_str();
  featurize->add_option("--out", fz.out, "Matrix CSV")->required();
  featurize->add_option("--catalog", fz.catalog, "Also write the pattern catalog");

  TrainEvalArgs te;
  auto* train_eval = app.add_subcommand("train-eval", "Train and evaluate classifiers on a matrix");
  train_eval->add_option("--matrix", te.matrix, "Matrix CSV")->required();
  train_eval->add_option("--classifiers", te.classifiers, "lr,knn,nb,dt,rf")
      ->delimiter(',')
      ->capture_default_str();
  train_eval->add_option("--split", te.split, "Train fraction")->capture_default_str();
  train_eval->add_option("--cv", te.cv, "Cross-validation folds (0 = off)")->capture_default_str();
  train_eval->add_flag("--standardize", te.standardize, "Standardize features on the training rows");
  train_eval->add_option("--out", te.out, "Output directory")->required();

  std::string spec_path, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
  synth->add_option("--spec", spec_path, "Synthetic spec (JSON)")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::string plan_path, run_out;
  auto* run = app.add_subcommand("run", "Run a full experiment plan");
  run->add_option("--plan", plan_path, "Experiment plan (JSON)")->required();
  run->add_option("--out", run_out, "Run directory")->required();

  std::vector<std::string> report_runs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Merge comparison tables of several runs");
  report->add_option("--runs", report_runs, "Run directories")->required();
  report->add_option("--out", report_out, "Output JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  // A seed given by flag or config file overrides the one inside a plan/spec.
  std::optional<std::uint64_t> explicit_seed;
  if (app.count("--seed") > 0) explicit_seed = seed;

  try {
    nsp::set_thread_count(threads);
    if (*encode) return cmd_encode(enc);
    if (*fetch) return cmd_fetch(fa);
    if (*mine) return cmd_mine(ma);
    if (*featurize) return cmd_featurize(fz);
    if (*train_eval) return cmd_train_eval(te, seed, app);
    if (*synth) return cmd_synth(spec_path, synth_out, explicit_seed, app);
    if (*run) return cmd_run(plan_path, run_out, explicit_seed, app);
    if (*report) return cmd_report(report_runs, report_out);
  } catch (const nsp::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const nsp::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const nsp::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const nsp::IoError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
