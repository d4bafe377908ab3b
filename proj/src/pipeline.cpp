#include "nbgec/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "nbgec/parallel.hpp"

namespace nbgec {

FeatureGroups parse_groups(std::string_view csv) {
  FeatureGroups g{false, false, false, false};
  for (const std::string& name : split(csv, ',')) {
    std::string_view n = trim(name);
    if (n.empty()) continue;
    if (n == "smt") g.smt = true;
    else if (n == "lexical_pos") g.lexical_pos = true;
    else if (n == "context") g.context = true;
    else if (n == "lm") g.lm = true;
    else throw Error("unknown feature group \"" + std::string(n) + "\"");
  }
  if (!g.any()) throw Error("at least one feature group is required");
  return g;
}

std::string groups_to_string(FeatureGroups g) {
  std::vector<std::string> parts;
  if (g.smt) parts.push_back("smt");
  if (g.lexical_pos) parts.push_back("lexical_pos");
  if (g.context) parts.push_back("context");
  if (g.lm) parts.push_back("lm");
  return join(parts, ",");
}

namespace {

std::vector<int> parse_int_list(std::string_view csv) {
  std::vector<int> out;
  for (const std::string& part : split(csv, ','))
    if (!trim(part).empty()) out.push_back(int(parse_long(trim(part))));
  return out;
}

}  // namespace

void PipelineConfig::apply(
    const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) {
    if (key == "train_annotated") train_annotated = value;
    else if (key == "dev_annotated") dev_annotated = value;
    else if (key == "test_annotated") test_annotated = value;
    else if (key == "train_nbest") train_nbest = value;
    else if (key == "dev_nbest") dev_nbest = value;
    else if (key == "test_nbest") test_nbest = value;
    else if (key == "lm_corpus") lm_corpus = value;
    else if (key == "annotations") annotations = value;
    else if (key == "out_dir") out_dir = value;
    else if (key == "lm_order") lm_order = int(parse_long(value));
    else if (key == "lm_backoff") lm_backoff = parse_double(value);
    else if (key == "lm_oov") lm_oov = parse_double(value);
    else if (key == "feature_groups") groups = parse_groups(value);
    else if (key == "min_count") min_count = int(parse_long(value));
    else if (key == "cw_epochs") cw_epochs = int(parse_long(value));
    else if (key == "cw_eta") cw_eta = parse_double(value);
    else if (key == "cw_variance") cw_variance = parse_double(value);
    else if (key == "cw_seed") cw_seed = std::uint64_t(parse_long(value));
    else if (key == "rerank_ns") rerank_ns = parse_int_list(value);
    else if (key == "select_ns") select_ns = parse_int_list(value);
    else if (key == "mert_seed") mert_seed = std::uint64_t(parse_long(value));
    else if (key == "significance_samples")
      significance_samples = int(parse_long(value));
    else if (key == "significance_seed")
      significance_seed = std::uint64_t(parse_long(value));
    else if (key == "jobs") jobs = int(parse_long(value));
    else throw Error("unknown config key \"" + key + "\"");
  }
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  PipelineConfig cfg;
  std::map<std::string, std::string> kv;
  std::size_t lineno = 0;
  for (const std::string& raw : split(read_file(path), '\n')) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected key=value", lineno);
    kv[std::string(trim(line.substr(0, eq)))] =
        std::string(trim(line.substr(eq + 1)));
  }
  cfg.apply(kv);
  return cfg;
}

std::vector<Sentence> sources_of(const Dataset& d) {
  std::vector<Sentence> out;
  out.reserve(d.sentences.size());
  for (const AnnotatedSentence& s : d.sentences) out.push_back(s.source);
  return out;
}

std::vector<LabeledExample> featurize_corpus(
    std::span<const NBestList> lists, std::span<const AnnotatedSentence> gold,
    const FeatureContext& ctx, int jobs) {
  if (lists.size() != gold.size())
    throw Error("n-best lists and gold annotations differ in size");
  std::vector<std::vector<LabeledExample>> per_sentence(lists.size());
  parallel_for(lists.size(), jobs, [&](std::size_t i) {
    per_sentence[i] = label_edits(lists[i], gold[i], ctx);
  });
  std::vector<LabeledExample> out;
  for (auto& v : per_sentence)
    for (auto& ex : v) out.push_back(std::move(ex));
  return out;
}

std::vector<SentenceAnalysis> analyze_corpus(std::span<const NBestList> lists,
                                             const FeatureContext& ctx,
                                             const FeatureDictionary& dict,
                                             const CWModel& model, int jobs) {
  std::vector<SentenceAnalysis> analyses(lists.size());
  parallel_for(lists.size(), jobs, [&](std::size_t i) {
    const NBestList& nbest = lists[i];
    const TokenAnnotations ann = ctx.annotations->annotate(nbest.source);
    analyses[i] = analyze_sentence(
        nbest, make_classifier_scorer(nbest.source, nbest, ann, ctx, dict,
                                      model));
  });
  return analyses;
}

std::vector<Correction> correct_corpus(
    std::span<const SentenceAnalysis> analyses, const DecisionConfig& cfg,
    const LogLinearWeights* w, int jobs) {
  std::vector<Correction> out(analyses.size());
  parallel_for(analyses.size(), jobs, [&](std::size_t i) {
    out[i] = correct(analyses[i], cfg, w);
  });
  return out;
}

namespace {

EvalResult evaluate_corrections(std::span<const AnnotatedSentence> gold,
                                std::span<const Correction> corrections) {
  std::vector<std::vector<Edit>> edits(corrections.size());
  for (std::size_t i = 0; i < corrections.size(); ++i)
    edits[i] = corrections[i].edits;
  return evaluate(gold, edits);
}

}  // namespace

double tune_threshold_on(std::span<const SentenceAnalysis> dev,
                         std::span<const AnnotatedSentence> gold, int jobs) {
  const int full = 1 << 20;  // no rank limit: selection sees the whole list
  return tune_threshold([&](double tau) {
    DecisionConfig cfg{DecisionMode::Select, full, tau};
    auto corrections = correct_corpus(dev, cfg, nullptr, jobs);
    return evaluate_corrections(gold, corrections).f05;
  });
}

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

AnnotationProvider load_provider(const PipelineConfig& cfg) {
  if (cfg.annotations.empty()) return AnnotationProvider::builtin();
  return AnnotationProvider::from_file(read_file(cfg.annotations));
}

struct LoadedSplit {
  Dataset gold;
  std::vector<Sentence> sources;
  std::vector<NBestList> nbest;
};

LoadedSplit load_split(const std::string& annotated_path,
                       const std::string& nbest_path) {
  LoadedSplit s;
  s.gold = parse_annotated(read_file(annotated_path));
  s.sources = sources_of(s.gold);
  s.nbest = parse_nbest(read_file(nbest_path), s.sources);
  return s;
}

std::string format_row_text(const ReportRow& row) {
  char buf[160];
  std::string sig;
  if (row.p_vs_baseline && *row.p_vs_baseline < 0.01) sig = " *";
  std::snprintf(buf, sizeof(buf), "%-8s %3d  %6.2f %6.2f %6.2f%s\n",
                row.system.c_str(), row.n, row.result.precision * 100.0,
                row.result.recall * 100.0, row.result.f05 * 100.0,
                sig.c_str());
  return buf;
}

std::string format_row_tsv(const ReportRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s\t%d\t%.6f\t%.6f\t%.6f\t%llu\t%llu\t%llu\t%s\n",
                row.system.c_str(), row.n, row.result.precision,
                row.result.recall, row.result.f05,
                (unsigned long long)row.result.matched,
                (unsigned long long)row.result.proposed,
                (unsigned long long)row.result.gold_count,
                row.p_vs_baseline ? format_double(*row.p_vs_baseline).c_str()
                                  : "NA");
  return buf;
}

void render_report(PipelineResult& res) {
  res.report_text = "system     n       P      R   F0.5\n";
  res.report_tsv = "system\tn\tP\tR\tF0.5\tmatched\tproposed\tgold\tp\n";
  for (const ReportRow& row : res.rows) {
    res.report_text += format_row_text(row);
    res.report_tsv += format_row_tsv(row);
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  const AnnotationProvider provider = load_provider(cfg);

  LoadedSplit train = load_split(cfg.train_annotated, cfg.train_nbest);
  LoadedSplit dev = load_split(cfg.dev_annotated, cfg.dev_nbest);
  LoadedSplit test = load_split(cfg.test_annotated, cfg.test_nbest);

  // Language model over the clean corpus.
  auto lm_sentences = parse_plain(read_file(cfg.lm_corpus));
  NGramModel lm =
      train_lm(lm_sentences, cfg.lm_order, cfg.lm_backoff, cfg.lm_oov);

  FeatureContext ctx{&lm, &provider, cfg.groups};

  // Classifier training data from the train split.
  auto examples = featurize_corpus(train.nbest, train.gold.sentences, ctx,
                                   cfg.jobs);
  if (examples.empty()) throw Error("train split produced no edits");
  FeatureDictionary dict = build_dictionary(examples, cfg.min_count);
  std::vector<SparseVector> xs(examples.size());
  std::vector<int> ys(examples.size());
  parallel_for(examples.size(), cfg.jobs, [&](std::size_t i) {
    xs[i] = vectorize(examples[i].vector, dict);
    ys[i] = examples[i].valid ? 1 : -1;
  });
  CWTrainConfig train_cfg{cfg.cw_epochs, cfg.cw_eta, cfg.cw_variance,
                          cfg.cw_seed};
  CWModel model = cw_train(xs, ys, dict.dim(), train_cfg);

  // Dev split: threshold grid search, then log-linear weight tuning.
  auto dev_analyses =
      analyze_corpus(dev.nbest, ctx, dict, model, cfg.jobs);
  PipelineResult res;
  res.tuned_tau =
      tune_threshold_on(dev_analyses, dev.gold.sentences, cfg.jobs);
  model.tau = res.tuned_tau;

  LogLinearWeights init =
      LogLinearWeights::identity_for(dev.nbest.front().feature_names);
  res.tuned_weights = tune_weights(dev_analyses, dev.gold.sentences, init,
                                   cfg.mert_seed, cfg.jobs);

  // Test split: one row per system configuration.
  auto test_analyses =
      analyze_corpus(test.nbest, ctx, dict, model, cfg.jobs);

  struct RowSpec {
    std::string system;
    DecisionConfig decision;
    bool needs_weights;
  };
  std::vector<RowSpec> specs;
  specs.push_back({"baseline", {DecisionMode::Baseline, 1, 0.0}, false});
  for (int n : cfg.rerank_ns)
    specs.push_back({"rerank", {DecisionMode::Rerank, n, 0.0}, true});
  for (int n : cfg.select_ns)
    specs.push_back(
        {"select", {DecisionMode::Select, n, res.tuned_tau}, false});

  std::vector<std::vector<Correction>> outputs;
  for (const RowSpec& spec : specs) {
    auto corrections = correct_corpus(
        test_analyses, spec.decision,
        spec.needs_weights ? &res.tuned_weights : nullptr, cfg.jobs);
    ReportRow row;
    row.system = spec.system;
    row.n = spec.decision.n;
    row.result = evaluate_corrections(test.gold.sentences, corrections);
    res.rows.push_back(std::move(row));
    outputs.push_back(std::move(corrections));
  }
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    SignificanceResult sig = sign_test(
        res.rows[i].result.per_sentence, res.rows[0].result.per_sentence,
        cfg.significance_samples, cfg.significance_seed);
    res.rows[i].p_vs_baseline = sig.p_value;
  }
  render_report(res);

  // Artifacts.
  const std::string& dir = cfg.out_dir;
  write_file(path_in(dir, "lm.model"), lm.to_string());
  write_file(path_in(dir, "dict.tsv"), dict.to_string());
  write_file(path_in(dir, "examples.train.tsv"),
             serialize_examples(examples));
  write_file(path_in(dir, "model.cw"), model.to_string());
  write_file(path_in(dir, "weights.txt"), res.tuned_weights.to_string());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::vector<Sentence> corrected;
    corrected.reserve(outputs[i].size());
    for (const Correction& c : outputs[i]) corrected.push_back(c.sentence);
    write_file(path_in(dir, "corrected." + specs[i].system + "-" +
                                std::to_string(specs[i].decision.n) + ".txt"),
               serialize_plain(corrected));
  }
  write_file(path_in(dir, "report.txt"), res.report_text);
  write_file(path_in(dir, "report.tsv"), res.report_tsv);
  return res;
}

AblationResult run_ablation(const PipelineConfig& cfg) {
  const AnnotationProvider provider = load_provider(cfg);
  LoadedSplit train = load_split(cfg.train_annotated, cfg.train_nbest);
  LoadedSplit dev = load_split(cfg.dev_annotated, cfg.dev_nbest);
  auto lm_sentences = parse_plain(read_file(cfg.lm_corpus));
  NGramModel lm =
      train_lm(lm_sentences, cfg.lm_order, cfg.lm_backoff, cfg.lm_oov);

  struct Variant {
    std::string name;
    FeatureGroups groups;
  };
  std::vector<Variant> variants = {
      {"all", {true, true, true, true}},
      {"no_smt", {false, true, true, true}},
      {"no_lexical_pos", {true, false, true, true}},
      {"no_context", {true, true, false, true}},
      {"no_lm", {true, true, true, false}},
  };

  AblationResult res;
  for (const Variant& variant : variants) {
    FeatureContext ctx{&lm, &provider, variant.groups};
    auto train_examples = featurize_corpus(train.nbest, train.gold.sentences,
                                           ctx, cfg.jobs);
    auto dev_examples =
        featurize_corpus(dev.nbest, dev.gold.sentences, ctx, cfg.jobs);
    if (train_examples.empty() || dev_examples.empty())
      throw Error("ablation has no edits to classify");
    FeatureDictionary dict = build_dictionary(train_examples, cfg.min_count);

    auto to_xy = [&](std::span<const LabeledExample> exs,
                     std::vector<SparseVector>& xs, std::vector<int>& ys) {
      xs.resize(exs.size());
      ys.resize(exs.size());
      parallel_for(exs.size(), cfg.jobs, [&](std::size_t i) {
        xs[i] = vectorize(exs[i].vector, dict);
        ys[i] = exs[i].valid ? 1 : -1;
      });
    };
    std::vector<SparseVector> train_x, dev_x;
    std::vector<int> train_y, dev_y;
    to_xy(train_examples, train_x, train_y);
    to_xy(dev_examples, dev_x, dev_y);

    CWTrainConfig train_cfg{cfg.cw_epochs, cfg.cw_eta, cfg.cw_variance,
                            cfg.cw_seed};
    CWModel model = cw_train(train_x, train_y, dict.dim(), train_cfg);
    res.rows.push_back(
        {variant.name, variant.groups, accuracy(model, dev_x, dev_y)});
  }

  res.report_text = "features            accuracy\n";
  res.report_tsv = "features\taccuracy\n";
  for (const AblationRow& row : res.rows) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-18s %8.2f\n", row.variant.c_str(),
                  row.accuracy * 100.0);
    res.report_text += buf;
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\n", row.variant.c_str(),
                  row.accuracy);
    res.report_tsv += buf;
  }
  write_file(path_in(cfg.out_dir, "ablation.txt"), res.report_text);
  write_file(path_in(cfg.out_dir, "ablation.tsv"), res.report_tsv);
  return res;
}

void run_synth(const SynthConfig& sc) {
  struct Split {
    const char* name;
    int count;
  };
  const Split splits[] = {{"train", sc.train}, {"dev", sc.dev},
                          {"test", sc.test}};

  std::string lm_corpus;
  for (std::size_t s = 0; s < std::size(splits); ++s) {
    ErrorModel em = ErrorModel::standard(derive_seed(sc.seed, s));
    SynthCorpus corpus =
        generate_corpus(sc.grammar_size, splits[s].count, em);

    SimulatedCorrector corrector;
    corrector.n = sc.nbest;
    corrector.seed = derive_seed(sc.seed, 100 + s);
    auto lists = simulate_nbest_corpus(corpus.annotated, corrector);

    const std::string base = path_in(sc.out_dir, splits[s].name);
    write_file(base + ".m2", serialize_annotated(corpus.annotated));
    write_file(base + ".src",
               serialize_plain(sources_of(corpus.annotated)));
    write_file(base + ".nbest", serialize_nbest(lists));
    if (s == 0) lm_corpus = serialize_plain(corpus.clean);
  }
  write_file(path_in(sc.out_dir, "lm_corpus.txt"), lm_corpus);

  std::string cfg;
  for (const Split& s : splits) {
    cfg += std::string(s.name) + "_annotated=" +
           path_in(sc.out_dir, std::string(s.name) + ".m2") + "\n";
    cfg += std::string(s.name) + "_nbest=" +
           path_in(sc.out_dir, std::string(s.name) + ".nbest") + "\n";
  }
  cfg += "lm_corpus=" + path_in(sc.out_dir, "lm_corpus.txt") + "\n";
  cfg += "out_dir=" + path_in(sc.out_dir, "out") + "\n";
  cfg += "lm_order=5\nlm_backoff=0.4\nlm_oov=-7\n";
  cfg += "feature_groups=smt,lexical_pos,context,lm\nmin_count=1\n";
  cfg += "cw_epochs=10\ncw_eta=0.9\ncw_variance=1\ncw_seed=1\n";
  cfg += "rerank_ns=5,10\nselect_ns=1,2,3,4,5\nmert_seed=2\n";
  cfg += "significance_samples=100\nsignificance_seed=3\n";
  cfg += "jobs=1\n";
  write_file(path_in(sc.out_dir, "pipeline.cfg"), cfg);
}

}  // namespace nbgec
