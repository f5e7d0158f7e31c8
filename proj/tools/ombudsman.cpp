// ombudsman: command-line entry point for the concern-mining pipeline.
//
// Every subcommand prints its result as JSON on stdout. Failures print
// {"error": {"code", "message", "details"}} on stderr and exit nonzero.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ombudsman/annotation/agreement.hpp"
#include "ombudsman/annotation/records.hpp"
#include "ombudsman/annotation/store.hpp"
#include "ombudsman/annotation/workflow.hpp"
#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/cascade/config.hpp"
#include "ombudsman/cascade/funnel.hpp"
#include "ombudsman/classifier/dataset.hpp"
#include "ombudsman/classifier/harness.hpp"
#include "ombudsman/classifier/splits.hpp"
#include "ombudsman/corpus/dedupe.hpp"
#include "ombudsman/corpus/ingest.hpp"
#include "ombudsman/corpus/reserve.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/dataset_mask.hpp"
#include "ombudsman/masking/frequency.hpp"
#include "ombudsman/masking/ner.hpp"
#include "ombudsman/pipeline/config.hpp"
#include "ombudsman/pipeline/run.hpp"
#include "ombudsman/scanner/scan.hpp"
#include "ombudsman/scanner/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ombudsman;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse: return 2;
    case ErrorCode::kMissingArtifact:
    case ErrorCode::kNotFound: return 3;
    case ErrorCode::kConflict: return 4;
    case ErrorCode::kRetriable:
    case ErrorCode::kBackend: return 5;
    default: return 1;
  }
}

void report_error(std::string_view code, const std::string& message, const std::vector<std::string>& details) {
  json err{{"error", {{"code", code}, {"message", message}, {"details", details}}}};
  std::cerr << err.dump() << std::endl;
}

void print(const json& j) { std::cout << j.dump(2) << std::endl; }

// Backends for commands that take --backend: a "rule" pair, or a
// "backends" section loaded from a config file.
cascade::Backends backends_from(const std::string& name, const std::string& config_path) {
  if (!config_path.empty()) {
    auto cfg = pipeline::load_sections(config_path, {"backends"});
    return cascade::make_backends(cfg.backends, cfg.base_dir);
  }
  if (name != "rule") {
    throw Error(ErrorCode::kInvalidArgument, "backend '" + name + "' needs --config with a backends section");
  }
  return cascade::make_backends({{"nli", {{"type", "rule"}}}, {"generative", {{"type", "rule"}}}});
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("ombudsman"));
  spdlog::cfg::load_env_levels();

  CLI::App app{"Mine social-web posts for anticipatory infrastructure concerns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ombudsman 0.3.0");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Fetch posts from the configured sources into a corpus file");
  std::string ingest_config, ingest_out;
  ingest->add_option("--config", ingest_config, "Pipeline config with an ingest section")->required();
  ingest->add_option("--out", ingest_out, "Corpus JSONL sink (appended)")->required();

  // reserve-wild
  auto* reserve = app.add_subcommand("reserve-wild", "Move a uniform sample into the in_the_wild partition");
  std::string reserve_in, reserve_out, reserve_wild_out;
  std::size_t reserve_n = 10000;
  std::uint64_t reserve_seed = 0;
  reserve->add_option("--corpus", reserve_in, "Input corpus")->required();
  reserve->add_option("--n", reserve_n, "Sample size")->capture_default_str();
  reserve->add_option("--seed", reserve_seed, "Sampling seed")->required();
  reserve->add_option("--out", reserve_out, "Remaining corpus")->required();
  reserve->add_option("--wild-out", reserve_wild_out, "Reserved posts")->required();

  // dedupe
  auto* dedupe = app.add_subcommand("dedupe", "Drop near-verbatim reposts");
  std::string dedupe_in, dedupe_out, dedupe_report;
  dedupe->add_option("--in", dedupe_in)->required();
  dedupe->add_option("--out", dedupe_out)->required();
  dedupe->add_option("--report", dedupe_report, "Write the dropped/kept pairs here");

  // cascade
  auto* cascade_cmd = app.add_subcommand("cascade", "Run the keyword, NLI and LLM filters");
  std::string cascade_config, cascade_corpus, cascade_out;
  cascade_cmd->add_option("--config", cascade_config, "Config with cascade and backends sections")->required();
  cascade_cmd->add_option("--corpus", cascade_corpus)->required();
  cascade_cmd->add_option("--out", cascade_out, "Directory for decisions, funnel and retained posts")->required();

  // agree
  auto* agree = app.add_subcommand("agree", "Inter-annotator agreement and hand-off candidates");
  std::string agree_records, agree_policy = "at_least_two_positive";
  agree->add_option("--records", agree_records)->required();
  agree->add_option("--policy", agree_policy, "unanimous|at_least_two_positive|majority")->capture_default_str();

  // adjudicate
  auto* adjud = app.add_subcommand("adjudicate", "Resolve expert labels with tiebreakers");
  std::string adj_experts, adj_tiebreakers, adj_out;
  adjud->add_option("--experts", adj_experts)->required();
  adjud->add_option("--tiebreakers", adj_tiebreakers);
  adjud->add_option("--out", adj_out, "Write AdjudicatedLabel JSONL here");

  // mask
  auto* mask = app.add_subcommand("mask", "Fill masked_text and locations of a labeled dataset");
  std::string mask_in, mask_out, mask_token = "<LOCATION>", mask_ner = R"({"type":"gazetteer"})";
  mask->add_option("--in", mask_in)->required();
  mask->add_option("--out", mask_out)->required();
  mask->add_option("--token", mask_token)->capture_default_str();
  mask->add_option("--ner", mask_ner, "NER backend section as JSON")->capture_default_str();

  // locations
  auto* locations = app.add_subcommand("locations", "Location frequency table of positive examples");
  std::string loc_in, loc_stoplist, loc_mode = "occurrences", loc_out;
  locations->add_option("--positives", loc_in, "Masked dataset; only label 1 rows count")->required();
  locations->add_option("--stoplist", loc_stoplist, "One surface per line (default: US states)");
  locations->add_option("--mode", loc_mode, "occurrences|posts")->capture_default_str();
  locations->add_option("--out", loc_out, "CSV path (default: stdout)");

  // train
  auto* train = app.add_subcommand("train", "Train and evaluate the configured classifiers");
  std::string train_config;
  bool train_force = false;
  train->add_option("--config", train_config)->required();
  train->add_flag("--force", train_force, "Retrain even when inputs are unchanged");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate trained runs on their test splits");
  std::string eval_model, eval_manifest, eval_dataset, eval_out;
  eval->add_option("--model", eval_model, "Model directory or model.json")->required();
  eval->add_option("--manifest", eval_manifest, "Split manifest")->required();
  eval->add_option("--dataset", eval_dataset)->required();
  eval->add_option("--out", eval_out);

  // zeroshot
  auto* zeroshot = app.add_subcommand("zeroshot", "Zero-shot LLM baseline on the test split");
  std::string zs_backend = "rule", zs_config, zs_manifest, zs_dataset, zs_prompt, zs_out;
  zeroshot->add_option("--backend", zs_backend, "rule, or any name when --config supplies backends")
      ->capture_default_str();
  zeroshot->add_option("--config", zs_config, "Config whose backends.generative is used");
  zeroshot->add_option("--manifest", zs_manifest)->required();
  zeroshot->add_option("--dataset", zs_dataset)->required();
  zeroshot->add_option("--prompt", zs_prompt, "Prompt template file (two <schema> placeholders)");
  zeroshot->add_option("--out", zs_out, "Write per-post outcomes JSONL here");

  // scan
  auto* scan = app.add_subcommand("scan", "Classify an unlabeled corpus and store a ScanReport");
  std::string scan_model, scan_corpus, scan_reports = "reports", scan_csv, scan_ner = R"({"type":"gazetteer"})";
  std::size_t scan_run = 0;
  scan->add_option("--model", scan_model, "Model directory or model.json")->required();
  scan->add_option("--corpus", scan_corpus)->required();
  scan->add_option("--run", scan_run, "Which trained run to use")->capture_default_str();
  scan->add_option("--reports", scan_reports, "Report store directory")->capture_default_str();
  scan->add_option("--csv", scan_csv, "Also export flagged items as CSV");
  scan->add_option("--ner", scan_ner, "NER backend section as JSON")->capture_default_str();

  // audit
  auto* audit = app.add_subcommand("audit", "Draw the positive/negative audit sample of a scan");
  std::string audit_scan, audit_reports = "reports";
  std::size_t audit_npos = 100, audit_nneg = 100;
  std::uint64_t audit_seed = 0;
  audit->add_option("--scan", audit_scan, "Scan report id")->required();
  audit->add_option("--npos", audit_npos)->capture_default_str();
  audit->add_option("--nneg", audit_nneg)->capture_default_str();
  audit->add_option("--seed", audit_seed)->required();
  audit->add_option("--reports", audit_reports)->capture_default_str();

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Metrics of a scan against audit labels");
  std::string est_scan, est_labels, est_reports = "reports";
  estimate->add_option("--scan", est_scan)->required();
  estimate->add_option("--labels", est_labels, "AnnotationRecord JSONL")->required();
  estimate->add_option("--reports", est_reports)->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP API for triage and annotation");
  std::string serve_host = "127.0.0.1", serve_config, serve_reports, serve_annotations, serve_posts, serve_assign;
  int serve_port = 8080;
  serve->add_option("--port", serve_port)->capture_default_str();
  serve->add_option("--host", serve_host)->capture_default_str();
  serve->add_option("--config", serve_config, "Take the paths below from a pipeline run");
  serve->add_option("--reports", serve_reports, "Report store directory");
  serve->add_option("--annotations", serve_annotations, "AnnotationRecord JSONL (appended)");
  serve->add_option("--posts", serve_posts, "Corpus of posts open for annotation");
  serve->add_option("--assignments", serve_assign, "post_id -> annotator ids JSON");

  // run
  auto* run = app.add_subcommand("run", "Run the pipeline stages");
  std::string run_config, run_stages, run_out;
  bool run_force = false;
  run->add_option("--config", run_config)->required();
  run->add_option("--stages", run_stages, "Comma-separated subset of ingest,cascade,annotate,adjudicate,train,scan");
  run->add_option("--out", run_out, "Override output_dir");
  run->add_flag("--force", run_force, "Rerun stages even when their inputs are unchanged");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a pipeline config and list every violation");
  std::string validate_config;
  validate->add_option("--config", validate_config)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("invalid_argument", e.what(), {});
    return 2;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*ingest) {
      auto cfg = pipeline::load_sections(ingest_config, {"ingest"});
      corpus::IngestOptions io;
      io.author_salt = cfg.ingest.author_salt;
      json results = json::object();
      for (const auto& spec : cfg.ingest.sources) results[spec.effective_name()] = corpus::ingest(spec, ingest_out, io);
      print(results);
    } else if (*reserve) {
      auto r = corpus::reserve_wild(corpus::load_corpus(reserve_in), reserve_n, reserve_seed);
      corpus::save_corpus(reserve_out, r.main);
      corpus::save_corpus(reserve_wild_out, r.wild);
      print({{"main", r.main.size()}, {"wild", r.wild.size()}});
    } else if (*dedupe) {
      auto r = corpus::dedupe(corpus::load_corpus(dedupe_in));
      corpus::save_corpus(dedupe_out, r.posts);
      if (!dedupe_report.empty()) write_json_file(dedupe_report, r.report);
      print({{"kept", r.posts.size()}, {"dropped", r.report.dropped.size()}});
    } else if (*cascade_cmd) {
      auto cfg = pipeline::load_sections(cascade_config, {"cascade", "backends"});
      auto backends = cascade::make_backends(cfg.backends, cfg.base_dir);
      auto result = cascade::run_cascade(corpus::load_corpus(cascade_corpus), cfg.cascade, backends);
      cascade::write_cascade_outputs(cascade_out, result);
      print(result.funnel);
    } else if (*agree) {
      auto records = annotation::load_records(agree_records);
      std::vector<annotation::AnnotationRecord> partisan;
      for (const auto& r : records) {
        if (annotation::is_partisan(r.affiliation)) partisan.push_back(r);
      }
      auto handoff = annotation::handoff_filter(partisan, annotation::parse_handoff_policy(agree_policy));
      print({{"agreement", annotation::compute_agreement(records)},
             {"handoff", {{"policy", agree_policy}, {"candidates", handoff.post_ids}, {"warnings", handoff.warnings}}}});
    } else if (*adjud) {
      auto experts = annotation::load_records(adj_experts);
      auto tiebreakers = adj_tiebreakers.empty() ? std::vector<annotation::AnnotationRecord>{}
                                                 : annotation::load_records(adj_tiebreakers);
      auto result = annotation::adjudicate(experts, tiebreakers);
      if (!adj_out.empty()) annotation::save_adjudicated(adj_out, result.labels);
      print(result);
    } else if (*mask) {
      auto dataset = classifier::load_dataset(mask_in);
      auto ner = masking::make_ner_backend(json::parse(mask_ner));
      masking::mask_dataset(dataset, *ner, mask_token);
      classifier::save_dataset(mask_out, dataset);
      std::size_t with_locations = 0;
      for (const auto& e : dataset) with_locations += e.locations.empty() ? 0 : 1;
      print({{"examples", dataset.size()}, {"with_locations", with_locations}});
    } else if (*locations) {
      std::vector<std::vector<std::string>> surfaces;
      for (const auto& e : classifier::load_dataset(loc_in)) {
        if (e.label == 1) surfaces.push_back(e.locations);
      }
      auto stop = loc_stoplist.empty() ? masking::default_location_stoplist() : masking::load_stoplist(loc_stoplist);
      if (loc_mode != "occurrences" && loc_mode != "posts") {
        throw Error(ErrorCode::kInvalidArgument, "--mode must be occurrences|posts");
      }
      auto mode = loc_mode == "posts" ? masking::FrequencyMode::kPosts : masking::FrequencyMode::kOccurrences;
      auto csv = masking::frequency_csv(masking::location_frequency(surfaces, stop, mode));
      if (loc_out.empty()) {
        std::cout << csv;
      } else {
        write_text_file(loc_out, csv);
      }
    } else if (*train) {
      auto cfg = pipeline::validate_config(train_config);
      pipeline::RunOptions opt;
      opt.stages = {"train"};
      opt.force = train_force;
      auto manifest = pipeline::run_pipeline(cfg, opt);
      print(*manifest.find("train"));
    } else if (*eval) {
      auto registry = classifier::ModelRegistry::with_defaults();
      auto ref = classifier::load_model_ref(eval_model);
      auto runs = classifier::load_runs(ref, registry);
      auto report = classifier::evaluate(runs, classifier::load_dataset(eval_dataset),
                                         classifier::load_manifest(eval_manifest), ref.masking, ref.model_identifier);
      report.protocol = ref.protocol;
      if (!eval_out.empty()) write_json_file(eval_out, report);
      print(report);
    } else if (*zeroshot) {
      auto backends = backends_from(zs_backend, zs_config);
      std::string prompt =
          zs_prompt.empty() ? std::string(cascade::default_zero_shot_prompt()) : read_text_file(zs_prompt);
      std::vector<classifier::ZeroShotOutcome> outcomes;
      auto report = classifier::zero_shot_evaluate(classifier::load_dataset(zs_dataset),
                                                   classifier::load_manifest(zs_manifest), prompt,
                                                   *backends.generative, &outcomes);
      if (!zs_out.empty()) {
        std::vector<json> rows(outcomes.begin(), outcomes.end());
        write_jsonl(zs_out, rows);
      }
      print(report);
    } else if (*scan) {
      auto registry = classifier::ModelRegistry::with_defaults();
      auto ref = classifier::load_model_ref(scan_model);
      auto runs = classifier::load_runs(ref, registry);
      if (scan_run >= runs.size()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "--run " + std::to_string(scan_run) + " but the model has " + std::to_string(runs.size()) + " run(s)");
      }
      auto ner = masking::make_ner_backend(json::parse(scan_ner));
      scanner::ScanOptions so;
      so.model_ref = ref.dir.generic_string() + "#" + std::to_string(scan_run);
      so.model_identifier = ref.model_identifier;
      so.masking = ref.masking;
      so.created_at = now_utc();
      auto report = scanner::scan(corpus::load_corpus(scan_corpus), *runs[scan_run], *ner, so);
      scanner::ReportStore(scan_reports).put(report);
      if (!scan_csv.empty()) write_text_file(scan_csv, scanner::flagged_csv(report));
      print({{"id", report.id},
             {"n_positive", report.n_positive},
             {"n_negative", report.n_negative},
             {"n_errors", report.errors.size()}});
    } else if (*audit) {
      scanner::ReportStore store(audit_reports);
      auto report = store.get(audit_scan);
      scanner::sample_audit(report, audit_npos, audit_nneg, audit_seed);
      store.put(report);
      print({{"id", report.id}, {"audit_pos_sample", report.audit_pos_sample}, {"audit_neg_sample", report.audit_neg_sample}});
    } else if (*estimate) {
      scanner::ReportStore store(est_reports);
      auto report = store.get(est_scan);
      scanner::estimate_wild_metrics(report, scanner::labels_from_records(annotation::load_records(est_labels)));
      store.put(report);
      print(json(report).at("estimated_metrics"));
    } else if (*serve) {
      if (!serve_config.empty()) {
        auto cfg = pipeline::parse_sections(pipeline::load_config_document(serve_config),
                                            fs::absolute(serve_config).parent_path(), {});
        auto out = cfg.output_dir;
        if (serve_reports.empty()) serve_reports = (out / "scan/reports").string();
        if (serve_annotations.empty()) serve_annotations = (out / "triage/annotations.jsonl").string();
        if (serve_posts.empty() && fs::exists(out / "cascade/retained.jsonl")) {
          serve_posts = (out / "cascade/retained.jsonl").string();
        }
        if (serve_assign.empty() && fs::exists(out / "annotate/assignments.json")) {
          serve_assign = (out / "annotate/assignments.json").string();
        }
      }
      if (serve_reports.empty() || serve_annotations.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "serve needs --config, or --reports and --annotations");
      }
      fs::create_directories(fs::absolute(serve_annotations).parent_path());
      scanner::ReportStore reports(serve_reports);
      annotation::AnnotationStore annotations(serve_annotations);
      scanner::ServiceContext ctx;
      ctx.reports = &reports;
      ctx.annotations = &annotations;
      if (!serve_posts.empty()) ctx.annotation_posts = corpus::load_corpus(serve_posts);
      if (!serve_assign.empty()) {
        ctx.assignments = read_json_file(serve_assign).get<std::map<std::string, std::vector<std::string>>>();
      }
      scanner::Service service(std::move(ctx));
      spdlog::info("serving on http://{}:{}", serve_host, serve_port);
      service.listen_blocking(serve_host, serve_port);
    } else if (*run) {
      auto cfg = pipeline::validate_config(run_config);
      if (!run_out.empty()) cfg.output_dir = fs::absolute(run_out);
      pipeline::RunOptions opt;
      opt.stages = pipeline::parse_stage_list(run_stages);
      opt.force = run_force;
      print(pipeline::run_pipeline(cfg, opt));
    } else if (*validate) {
      auto doc = pipeline::load_config_document(validate_config);
      auto problems = pipeline::config_violations(doc, fs::absolute(validate_config).parent_path());
      if (!problems.empty()) {
        report_error("config", std::to_string(problems.size()) + " config violation(s)", problems);
        return 2;
      }
      print({{"valid", true}});
    }
  } catch (const Error& e) {
    report_error(to_string(e.code()), e.what(), e.details());
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    report_error("parse", e.what(), {});
    return 2;
  } catch (const std::exception& e) {
    report_error("internal", e.what(), {});
    return 1;
  }
  return 0;
}
