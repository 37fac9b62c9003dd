// SECite command-line driver: runs the citation-sentiment pipeline end to end
// or stage by stage, handing JSON artifacts between stages so intermediate
// results can be inspected or hand-edited.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "secite/pipeline.hpp"

namespace {

struct CliOptions {
    secite::RunConfig cfg;
    std::string stopwords, lexicon_pos, lexicon_neg, templates, merge_contexts;

    void finish() {
        if (!stopwords.empty()) cfg.stopwords_path = stopwords;
        if (!lexicon_pos.empty()) cfg.lexicon_positive_path = lexicon_pos;
        if (!lexicon_neg.empty()) cfg.lexicon_negative_path = lexicon_neg;
        if (!templates.empty()) cfg.templates_dir = templates;
        if (!merge_contexts.empty()) cfg.merge_contexts_path = merge_contexts;
    }
};

void add_common_options(CLI::App* cmd, CliOptions& opts, bool needs_manifest) {
    auto* manifest = cmd->add_option("--manifest", opts.cfg.manifest_path,
                                     "Corpus manifest (JSON; see README)");
    if (needs_manifest) manifest->required();
    cmd->add_option("--out", opts.cfg.out_dir, "Output directory for stage artifacts")->required();
    cmd->add_option("--k", opts.cfg.ks, "Cluster counts to compare (default 2,3)")
        ->delimiter(',');
    cmd->add_option("--seed", opts.cfg.seed, "Random seed (default 42)");
    cmd->add_flag("--offline", opts.cfg.offline,
                  "No remote calls: hashed fallback embeddings, extractive summaries");
    cmd->add_flag("--embed-cleaned", opts.cfg.embed_cleaned,
                  "Embed cleaned text instead of the original sentences");
    cmd->add_flag("--normalize", opts.cfg.normalize, "L2-normalize vectors before clustering");
    cmd->add_option("--stopwords", opts.stopwords, "Stopword file (one word per line)");
    cmd->add_option("--lexicon-pos", opts.lexicon_pos, "Positive polarity word list");
    cmd->add_option("--lexicon-neg", opts.lexicon_neg, "Negative polarity word list");
    cmd->add_option("--templates", opts.templates, "Prompt template directory");
    cmd->add_option("--embed-url", opts.cfg.embed_url,
                    "Embedding service base URL (POST {url}/embed)");
    cmd->add_option("--gen-url", opts.cfg.gen_url,
                    "Generation service base URL (POST {url}/generate)");
    cmd->add_option("--merge-contexts", opts.merge_contexts,
                    "Manual context file to merge (doc_id<TAB>sentence per line)");
    cmd->add_option("--fallback-dim", opts.cfg.fallback_dim,
                    "Hashed fallback embedding dimension (default 512)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SECite: extract, cluster, project, and summarize citation sentences"};
    app.require_subcommand(1);

    CliOptions run_opts, extract_opts, cluster_opts, project_opts, summarize_opts, evaluate_opts;

    auto* cmd_run = app.add_subcommand("run", "Run the full pipeline");
    add_common_options(cmd_run, run_opts, true);
    auto* cmd_extract = app.add_subcommand("extract", "Ingest the corpus and write contexts.json");
    add_common_options(cmd_extract, extract_opts, true);
    auto* cmd_cluster =
        app.add_subcommand("cluster", "Cluster contexts.json into sentiment groups");
    add_common_options(cmd_cluster, cluster_opts, false);
    auto* cmd_project = app.add_subcommand("project", "Project embeddings to 2-D and render SVG");
    add_common_options(cmd_project, project_opts, false);
    auto* cmd_summarize = app.add_subcommand("summarize", "Generate polarity summaries");
    add_common_options(cmd_summarize, summarize_opts, false);
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Assemble report.json and report.md");
    add_common_options(cmd_evaluate, evaluate_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            run_opts.finish();
            const secite::PipelineResult result = secite::run_pipeline(run_opts.cfg);
            std::printf("report written to %s\n",
                        result.report.artifacts.count("contexts_json")
                            ? (run_opts.cfg.out_dir + "/" + secite::kReportJsonFile).c_str()
                            : secite::kReportJsonFile);
            if (result.exit_code != 0) {
                std::fprintf(stderr, "one or more stages failed; see report warnings\n");
            }
            return result.exit_code;
        }
        if (cmd_extract->parsed()) {
            extract_opts.finish();
            secite::cli_extract(extract_opts.cfg);
            return 0;
        }
        if (cmd_cluster->parsed()) {
            cluster_opts.finish();
            secite::cli_cluster(cluster_opts.cfg);
            return 0;
        }
        if (cmd_project->parsed()) {
            project_opts.finish();
            secite::cli_project(project_opts.cfg);
            return 0;
        }
        if (cmd_summarize->parsed()) {
            summarize_opts.finish();
            secite::cli_summarize(summarize_opts.cfg);
            return 0;
        }
        if (cmd_evaluate->parsed()) {
            evaluate_opts.finish();
            return secite::cli_evaluate(evaluate_opts.cfg);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
