#include "nbgec/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "nbgec/pipeline.hpp"

namespace nbgec {

namespace {

// Options shared by every subcommand that runs the trained model stack.
struct StackOptions {
  std::string nbest, gold, src, lm, model, dict, annotations;
  std::string groups = "smt,lexical_pos,context,lm";
  int jobs = 1;
};

void add_stack_options(CLI::App* sub, StackOptions& o, bool need_gold,
                       bool need_model) {
  sub->add_option("--nbest", o.nbest, "n-best hypothesis file")->required();
  if (need_gold)
    sub->add_option("--gold", o.gold, "annotated gold file")->required();
  else {
    sub->add_option("--gold", o.gold,
                    "annotated gold file (sources + optional report)");
    sub->add_option("--src", o.src, "companion source file");
  }
  sub->add_option("--lm", o.lm, "trained language model file")->required();
  if (need_model) {
    sub->add_option("--model", o.model, "trained classifier file")
        ->required();
    sub->add_option("--dict", o.dict, "feature dictionary file")->required();
  }
  sub->add_option("--annotations", o.annotations,
                  "annotation file (default: builtin analyzer)");
  sub->add_option("--groups", o.groups, "feature groups, comma separated");
  sub->add_option("--jobs", o.jobs, "worker threads (1 = serial)");
}

struct Stack {
  Dataset gold;
  bool has_gold = false;
  std::vector<Sentence> sources;
  std::vector<NBestList> lists;
  std::optional<NGramModel> lm;
  AnnotationProvider provider = AnnotationProvider::builtin();
  std::optional<FeatureDictionary> dict;
  std::optional<CWModel> model;
  FeatureContext ctx;
};

Stack load_stack(const StackOptions& o, bool need_model) {
  Stack s;
  if (!o.gold.empty()) {
    s.gold = parse_annotated(read_file(o.gold));
    s.has_gold = true;
    s.sources = sources_of(s.gold);
  } else if (!o.src.empty()) {
    s.sources = parse_plain(read_file(o.src));
  } else {
    throw Error("need --gold or --src for the source sentences");
  }
  s.lists = parse_nbest(read_file(o.nbest), s.sources);
  s.lm = NGramModel::from_string(read_file(o.lm));
  if (!o.annotations.empty())
    s.provider = AnnotationProvider::from_file(read_file(o.annotations));
  if (need_model) {
    s.dict = FeatureDictionary::from_string(read_file(o.dict));
    s.model = CWModel::from_string(read_file(o.model));
  }
  s.ctx = FeatureContext{&*s.lm, &s.provider, parse_groups(o.groups)};
  return s;
}

std::vector<Sentence> corrected_sentences(
    std::span<const Correction> corrections) {
  std::vector<Sentence> out;
  out.reserve(corrections.size());
  for (const Correction& c : corrections) out.push_back(c.sentence);
  return out;
}

std::vector<std::vector<Edit>> edits_against(
    const Dataset& gold, std::span<const Sentence> corrected) {
  if (gold.sentences.size() != corrected.size())
    throw Error("hypothesis file has " + std::to_string(corrected.size()) +
                " sentences, gold has " +
                std::to_string(gold.sentences.size()));
  std::vector<std::vector<Edit>> edits(corrected.size());
  for (std::size_t i = 0; i < corrected.size(); ++i)
    edits[i] = extract_edits(gold.sentences[i].source, corrected[i]);
  return edits;
}

void emit_report(const EvalResult& r, const std::string& out_path) {
  std::string text = format_report(r);
  std::fputs(text.c_str(), stdout);
  if (!out_path.empty()) {
    write_file(out_path, text);
    write_file(out_path + ".tsv", format_report_tsv(r));
  }
}

void write_corrections(const std::string& out,
                       std::span<const Correction> corrections,
                       const std::string& edits_out) {
  write_file(out, serialize_plain(corrected_sentences(corrections)));
  if (!edits_out.empty()) {
    std::vector<SentenceEdit> all;
    for (std::size_t i = 0; i < corrections.size(); ++i)
      for (const Edit& e : corrections[i].edits)
        all.push_back({int(i), e});
    write_file(edits_out, serialize_edit_list(all));
  }
}

void setup_app(CLI::App& app) {
  app.require_subcommand(1);

  // ---- synth ----
  auto synth_cfg = std::make_shared<SynthConfig>();
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic corpus with simulated n-best lists");
  synth->add_option("--out-dir", synth_cfg->out_dir, "output directory");
  synth->add_option("--seed", synth_cfg->seed, "master seed");
  synth->add_option("--train", synth_cfg->train, "train sentences");
  synth->add_option("--dev", synth_cfg->dev, "dev sentences");
  synth->add_option("--test", synth_cfg->test, "test sentences");
  synth->add_option("--grammar-size", synth_cfg->grammar_size,
                    "lexical variety");
  synth->add_option("--nbest", synth_cfg->nbest, "hypotheses per sentence");
  synth->callback([synth_cfg] {
    run_synth(*synth_cfg);
    std::printf("wrote corpus and pipeline.cfg under %s\n",
                synth_cfg->out_dir.c_str());
  });

  // ---- train-lm ----
  struct TrainLmOpts {
    std::string corpus, out;
    int order = 5;
    double backoff = 0.4, oov = -7.0;
  };
  auto lm_opts = std::make_shared<TrainLmOpts>();
  auto* train_lm_cmd =
      app.add_subcommand("train-lm", "Train a count-based language model");
  train_lm_cmd->add_option("--corpus", lm_opts->corpus, "tokenized text")
      ->required();
  train_lm_cmd->add_option("--out", lm_opts->out, "model file")->required();
  train_lm_cmd->add_option("--order", lm_opts->order, "n-gram order (1..5)");
  train_lm_cmd->add_option("--backoff", lm_opts->backoff, "backoff factor");
  train_lm_cmd->add_option("--oov", lm_opts->oov, "log10 OOV floor");
  train_lm_cmd->callback([lm_opts] {
    auto corpus = parse_plain(read_file(lm_opts->corpus));
    NGramModel lm =
        train_lm(corpus, lm_opts->order, lm_opts->backoff, lm_opts->oov);
    write_file(lm_opts->out, lm.to_string());
    std::printf("trained order-%d model on %zu sentences\n", lm_opts->order,
                corpus.size());
  });

  // ---- extract-edits ----
  struct ExtractOpts {
    std::string src, hyp, out;
  };
  auto ex_opts = std::make_shared<ExtractOpts>();
  auto* extract = app.add_subcommand(
      "extract-edits", "Extract phrase edits between aligned sentence files");
  extract->add_option("--src", ex_opts->src, "source sentences")->required();
  extract->add_option("--hyp", ex_opts->hyp, "hypothesis sentences")
      ->required();
  extract->add_option("--out", ex_opts->out, "edit list file")->required();
  extract->callback([ex_opts] {
    auto src = parse_plain(read_file(ex_opts->src));
    auto hyp = parse_plain(read_file(ex_opts->hyp));
    if (src.size() != hyp.size())
      throw Error("source and hypothesis files differ in length");
    std::vector<SentenceEdit> all;
    for (std::size_t i = 0; i < src.size(); ++i)
      for (Edit& e : extract_edits(src[i], hyp[i])) {
        e.hyp_rank = 1;
        all.push_back({int(i), std::move(e)});
      }
    write_file(ex_opts->out, serialize_edit_list(all));
    std::printf("extracted %zu edits\n", all.size());
  });

  // ---- featurize ----
  auto feat_opts = std::make_shared<StackOptions>();
  auto feat_out = std::make_shared<std::string>();
  auto* featurize = app.add_subcommand(
      "featurize", "Label n-best edits against gold and extract features");
  add_stack_options(featurize, *feat_opts, true, false);
  featurize->add_option("--out", *feat_out, "labeled example file")
      ->required();
  featurize->callback([feat_opts, feat_out] {
    Stack s = load_stack(*feat_opts, false);
    auto examples = featurize_corpus(s.lists, s.gold.sentences, s.ctx,
                                     feat_opts->jobs);
    write_file(*feat_out, serialize_examples(examples));
    std::printf("wrote %zu labeled examples\n", examples.size());
  });

  // ---- train-classifier ----
  struct TrainClsOpts {
    std::string examples, model_out, dict_out;
    CWTrainConfig cw;
    int min_count = 1;
  };
  auto cls_opts = std::make_shared<TrainClsOpts>();
  auto* train_cls = app.add_subcommand(
      "train-classifier", "Train the confidence-weighted edit classifier");
  train_cls->add_option("--examples", cls_opts->examples,
                        "labeled example file")
      ->required();
  train_cls->add_option("--model-out", cls_opts->model_out, "classifier file")
      ->required();
  train_cls->add_option("--dict-out", cls_opts->dict_out, "dictionary file")
      ->required();
  train_cls->add_option("--epochs", cls_opts->cw.epochs, "training passes");
  train_cls->add_option("--eta", cls_opts->cw.eta, "confidence parameter");
  train_cls->add_option("--variance", cls_opts->cw.initial_variance,
                        "initial variance");
  train_cls->add_option("--seed", cls_opts->cw.shuffle_seed, "shuffle seed");
  train_cls->add_option("--min-count", cls_opts->min_count,
                        "categorical feature cutoff");
  train_cls->callback([cls_opts] {
    auto examples = parse_examples(read_file(cls_opts->examples));
    if (examples.empty()) throw Error("no labeled examples");
    FeatureDictionary dict = build_dictionary(examples, cls_opts->min_count);
    std::vector<SparseVector> xs(examples.size());
    std::vector<int> ys(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      xs[i] = vectorize(examples[i].vector, dict);
      ys[i] = examples[i].valid ? 1 : -1;
    }
    CWModel model = cw_train(xs, ys, dict.dim(), cls_opts->cw);
    write_file(cls_opts->dict_out, dict.to_string());
    write_file(cls_opts->model_out, model.to_string());
    std::printf("trained on %zu examples, accuracy %.4f\n", examples.size(),
                accuracy(model, xs, ys));
  });

  // ---- tune-threshold ----
  auto thr_opts = std::make_shared<StackOptions>();
  auto* tune_thr = app.add_subcommand(
      "tune-threshold",
      "Grid-search the decision threshold on a dev set and update the model");
  add_stack_options(tune_thr, *thr_opts, true, true);
  tune_thr->callback([thr_opts] {
    Stack s = load_stack(*thr_opts, true);
    auto analyses =
        analyze_corpus(s.lists, s.ctx, *s.dict, *s.model, thr_opts->jobs);
    double tau =
        tune_threshold_on(analyses, s.gold.sentences, thr_opts->jobs);
    s.model->tau = tau;
    write_file(thr_opts->model, s.model->to_string());
    std::printf("tau %.2f\n", tau);
  });

  // ---- tune-weights ----
  auto tw_opts = std::make_shared<StackOptions>();
  struct TwExtra {
    std::string out, init;
    std::uint64_t seed = 2;
  };
  auto tw_extra = std::make_shared<TwExtra>();
  auto* tune_w = app.add_subcommand(
      "tune-weights", "Tune log-linear reranking weights on a dev set");
  add_stack_options(tune_w, *tw_opts, true, true);
  tune_w->add_option("--out", tw_extra->out, "weights file")->required();
  tune_w->add_option("--init", tw_extra->init, "initial weights file");
  tune_w->add_option("--seed", tw_extra->seed, "restart seed");
  tune_w->callback([tw_opts, tw_extra] {
    Stack s = load_stack(*tw_opts, true);
    auto analyses =
        analyze_corpus(s.lists, s.ctx, *s.dict, *s.model, tw_opts->jobs);
    LogLinearWeights init =
        tw_extra->init.empty()
            ? LogLinearWeights::identity_for(s.lists.front().feature_names)
            : LogLinearWeights::from_string(read_file(tw_extra->init));
    LogLinearWeights tuned = tune_weights(analyses, s.gold.sentences, init,
                                          tw_extra->seed, tw_opts->jobs);
    write_file(tw_extra->out, tuned.to_string());
    std::printf("tuned %zu weights\n", tuned.lambda.size());
  });

  // ---- rerank ----
  auto rr_opts = std::make_shared<StackOptions>();
  struct RerankExtra {
    std::string weights, out, edits_out, report;
    int n = 0;
  };
  auto rr_extra = std::make_shared<RerankExtra>();
  auto* rerank_cmd = app.add_subcommand(
      "rerank", "Rescore n-best lists with the classifier feature");
  add_stack_options(rerank_cmd, *rr_opts, false, true);
  rerank_cmd->add_option("--weights", rr_extra->weights, "weights file")
      ->required();
  rerank_cmd->add_option("--out", rr_extra->out, "corrected sentences")
      ->required();
  rerank_cmd->add_option("--edits-out", rr_extra->edits_out,
                         "edit list output");
  rerank_cmd->add_option("--report", rr_extra->report,
                         "evaluation report (needs --gold)");
  rerank_cmd->add_option("--n", rr_extra->n, "hypotheses to rerank (0 = all)");
  rerank_cmd->callback([rr_opts, rr_extra] {
    Stack s = load_stack(*rr_opts, true);
    auto analyses =
        analyze_corpus(s.lists, s.ctx, *s.dict, *s.model, rr_opts->jobs);
    LogLinearWeights w =
        LogLinearWeights::from_string(read_file(rr_extra->weights));
    DecisionConfig cfg{DecisionMode::Rerank,
                       rr_extra->n > 0 ? rr_extra->n : 1 << 20, 0.0};
    auto corrections = correct_corpus(analyses, cfg, &w, rr_opts->jobs);
    write_corrections(rr_extra->out, corrections, rr_extra->edits_out);
    if (!rr_extra->report.empty()) {
      if (!s.has_gold) throw Error("--report needs --gold");
      std::vector<std::vector<Edit>> edits(corrections.size());
      for (std::size_t i = 0; i < corrections.size(); ++i)
        edits[i] = corrections[i].edits;
      emit_report(evaluate(s.gold.sentences, edits), rr_extra->report);
    }
  });

  // ---- select ----
  auto sel_opts = std::make_shared<StackOptions>();
  struct SelectExtra {
    std::string out, edits_out, report;
    int n = 1 << 20;
    double tau = 0.0;
    bool tau_set = false;
  };
  auto sel_extra = std::make_shared<SelectExtra>();
  auto* select_cmd = app.add_subcommand(
      "select", "Greedily apply the best non-overlapping n-best edits");
  add_stack_options(select_cmd, *sel_opts, false, true);
  select_cmd->add_option("--out", sel_extra->out, "corrected sentences")
      ->required();
  select_cmd->add_option("--edits-out", sel_extra->edits_out,
                         "edit list output");
  select_cmd->add_option("--report", sel_extra->report,
                         "evaluation report (needs --gold)");
  select_cmd->add_option("--n", sel_extra->n, "hypotheses to pool");
  select_cmd
      ->add_option("--tau", sel_extra->tau,
                   "score threshold (default: model's tuned value)")
      ->each([sel_extra](const std::string&) { sel_extra->tau_set = true; });
  select_cmd->callback([sel_opts, sel_extra] {
    Stack s = load_stack(*sel_opts, true);
    auto analyses =
        analyze_corpus(s.lists, s.ctx, *s.dict, *s.model, sel_opts->jobs);
    double tau = sel_extra->tau_set ? sel_extra->tau : s.model->tau;
    DecisionConfig cfg{DecisionMode::Select, sel_extra->n, tau};
    auto corrections = correct_corpus(analyses, cfg, nullptr, sel_opts->jobs);
    write_corrections(sel_extra->out, corrections, sel_extra->edits_out);
    if (!sel_extra->report.empty()) {
      if (!s.has_gold) throw Error("--report needs --gold");
      std::vector<std::vector<Edit>> edits(corrections.size());
      for (std::size_t i = 0; i < corrections.size(); ++i)
        edits[i] = corrections[i].edits;
      emit_report(evaluate(s.gold.sentences, edits), sel_extra->report);
    }
  });

  // ---- evaluate ----
  struct EvalOpts {
    std::string hyp, gold, out;
  };
  auto ev_opts = std::make_shared<EvalOpts>();
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "Score corrected sentences against gold annotations");
  eval_cmd->add_option("--hyp", ev_opts->hyp, "corrected sentences")
      ->required();
  eval_cmd->add_option("--gold", ev_opts->gold, "annotated gold file")
      ->required();
  eval_cmd->add_option("--out", ev_opts->out, "report file");
  eval_cmd->callback([ev_opts] {
    Dataset gold = parse_annotated(read_file(ev_opts->gold));
    auto corrected = parse_plain(read_file(ev_opts->hyp));
    auto edits = edits_against(gold, corrected);
    emit_report(evaluate(gold.sentences, edits), ev_opts->out);
  });

  // ---- significance ----
  struct SigOpts {
    std::string a, b, gold;
    int samples = 100;
    std::uint64_t seed = 1;
  };
  auto sig_opts = std::make_shared<SigOpts>();
  auto* sig_cmd = app.add_subcommand(
      "significance",
      "One-tailed sign test with bootstrap resampling between two runs");
  sig_cmd->add_option("--a", sig_opts->a, "corrected sentences, system A")
      ->required();
  sig_cmd->add_option("--b", sig_opts->b, "corrected sentences, system B")
      ->required();
  sig_cmd->add_option("--gold", sig_opts->gold, "annotated gold file")
      ->required();
  sig_cmd->add_option("--samples", sig_opts->samples, "bootstrap resamples");
  sig_cmd->add_option("--seed", sig_opts->seed, "resampling seed");
  sig_cmd->callback([sig_opts] {
    Dataset gold = parse_annotated(read_file(sig_opts->gold));
    auto a = parse_plain(read_file(sig_opts->a));
    auto b = parse_plain(read_file(sig_opts->b));
    EvalResult ra = evaluate(gold.sentences, edits_against(gold, a));
    EvalResult rb = evaluate(gold.sentences, edits_against(gold, b));
    SignificanceResult sig =
        sign_test(ra.per_sentence, rb.per_sentence, sig_opts->samples,
                  sig_opts->seed);
    std::printf("F0.5 A %.4f  B %.4f\n", ra.f05, rb.f05);
    std::printf("wins A/B/ties %d/%d/%d\n", sig.wins_a, sig.wins_b, sig.ties);
    std::printf("p %.6f%s\n", sig.p_value, sig.p_value < 0.01 ? " *" : "");
  });

  // ---- ablate / pipeline ----
  struct CfgOpts {
    std::string config, out_dir;
    int jobs = -1;
  };
  auto make_cfg = [](const CfgOpts& o) {
    std::string path = o.config;
    if (path.empty()) {
      const char* env = std::getenv("NBGEC_CONFIG");
      if (env) path = env;
    }
    if (path.empty()) throw Error("need --config or NBGEC_CONFIG");
    PipelineConfig cfg = PipelineConfig::from_file(path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.jobs >= 0) cfg.jobs = o.jobs;
    return cfg;
  };

  auto ab_opts = std::make_shared<CfgOpts>();
  auto* ablate_cmd = app.add_subcommand(
      "ablate", "Classifier accuracy with each feature group removed");
  ablate_cmd->add_option("--config", ab_opts->config, "pipeline config file");
  ablate_cmd->add_option("--out-dir", ab_opts->out_dir, "output directory");
  ablate_cmd->add_option("--jobs", ab_opts->jobs, "worker threads");
  ablate_cmd->callback([ab_opts, make_cfg] {
    AblationResult res = run_ablation(make_cfg(*ab_opts));
    std::fputs(res.report_text.c_str(), stdout);
  });

  auto pl_opts = std::make_shared<CfgOpts>();
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "Run the full train/tune/correct/evaluate pipeline");
  pipeline_cmd->add_option("--config", pl_opts->config,
                           "pipeline config file");
  pipeline_cmd->add_option("--out-dir", pl_opts->out_dir, "output directory");
  pipeline_cmd->add_option("--jobs", pl_opts->jobs, "worker threads");
  pipeline_cmd->callback([pl_opts, make_cfg] {
    PipelineResult res = run_pipeline(make_cfg(*pl_opts));
    std::fputs(res.report_text.c_str(), stdout);
  });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"n-best hypothesis post-processing for grammatical error "
               "correction"};
  setup_app(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("nbgec");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(int(argv.size()), argv.data());
}

}  // namespace nbgec
