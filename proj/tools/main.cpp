// dkgqa command-line driver: build-kg, gen-data, train, eval, explain.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "dkgqa/commands.hpp"

namespace {

// Flags shared by train/eval/explain, mirroring RunConfig fields.
void add_run_options(CLI::App& cmd, dkgqa::RunConfig& config, bool training) {
    cmd.set_config("--config")->configurable(false);
    cmd.add_option("--kg", config.kg, "serialized knowledge-graph store");
    cmd.add_option("--dataset", config.dataset, "dataset file (one JSON record per line)");
    cmd.add_option("--checkpoint", config.checkpoint, "model checkpoint path");
    cmd.add_option("--shards", config.shards, "shard count for the follow kernel");
    if (training) {
        cmd.add_option("--dev", config.dev, "dev split for best-checkpoint selection");
        cmd.add_option("--metrics-log", config.metrics_log, "training metrics log path");
        cmd.add_option("--variant", config.variant, "model variant: baseline | intersect");
        cmd.add_option("--dim", config.dim, "encoder dimension d");
        cmd.add_option("--max-hops", config.max_hops, "maximum hop count");
        cmd.add_option("--eps", config.eps, "prediction clamp margin");
        cmd.add_option("--batch-size", config.batch_size, "samples per micro-batch");
        cmd.add_option("--grad-accum", config.grad_accum, "micro-batches per optimizer step");
        cmd.add_option("--steps", config.steps, "optimizer steps");
        cmd.add_option("--learning-rate", config.learning_rate, "Adam learning rate");
        cmd.add_option("--seed", config.seed, "random seed");
        cmd.add_option("--eval-interval", config.eval_interval, "steps between dev evaluations");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentiable knowledge-graph question answering"};
    app.require_subcommand(1);

    dkgqa::BuildKgArgs build_args;
    CLI::App* build = app.add_subcommand("build-kg", "ingest TSV triples into a store");
    build->add_option("--input", build_args.input, "TSV triple file")->required();
    build->add_option("--output", build_args.output, "store output path")->required();
    build->add_option("--seeds", build_args.seeds_file, "seed entity file for subgraph cut");
    build->add_option("--hops", build_args.hops, "subgraph radius around the seeds");
    build->add_flag("!--no-inverses", build_args.add_inverses,
                    "skip adding inverse relations");

    dkgqa::GenDataArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-data", "generate the synthetic QA benchmark");
    gen->add_option("--kg-output", gen_args.kg_output, "TSV triple output")->required();
    gen->add_option("--train-output", gen_args.train_output, "train split output")->required();
    gen->add_option("--dev-output", gen_args.dev_output, "dev split output")->required();
    gen->add_option("--test-output", gen_args.test_output, "test split output")->required();
    gen->add_option("--seed", gen_args.seed, "random seed");
    gen->add_option("--actors", gen_args.spec.n_actors, "actor count");
    gen->add_option("--films", gen_args.spec.n_films, "film count");
    gen->add_option("--characters", gen_args.spec.n_characters, "character count");
    gen->add_option("--n-train", gen_args.spec.n_train, "train split size");
    gen->add_option("--n-dev", gen_args.spec.n_dev, "dev split size");
    gen->add_option("--n-test", gen_args.spec.n_test, "test split size");
    gen->add_option("--two-entity-fraction", gen_args.spec.two_entity_fraction,
                    "fraction of two-entity questions per split");

    dkgqa::RunConfig train_config;
    CLI::App* train = app.add_subcommand("train", "train a model");
    add_run_options(*train, train_config, true);

    dkgqa::RunConfig eval_config;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    add_run_options(*eval, eval_config, false);
    eval->add_option("--report", eval_config.report, "JSON report output path");

    dkgqa::RunConfig explain_config;
    CLI::App* explain = app.add_subcommand("explain", "print inference chains for a sample");
    add_run_options(*explain, explain_config, false);
    explain->add_option("--index", explain_config.index, "sample index in the dataset");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            dkgqa::cmd_build_kg(build_args, std::cout);
        } else if (gen->parsed()) {
            dkgqa::cmd_gen_data(gen_args, std::cout);
        } else if (train->parsed()) {
            dkgqa::cmd_train(train_config, std::cout);
        } else if (eval->parsed()) {
            dkgqa::cmd_eval(eval_config, std::cout);
        } else if (explain->parsed()) {
            dkgqa::cmd_explain(explain_config, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
