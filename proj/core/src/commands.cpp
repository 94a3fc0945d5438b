#include "dkgqa/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "dkgqa/explain.hpp"

namespace dkgqa {

namespace {

void require_path(const std::string& value, const char* flag) {
    if (value.empty()) {
        throw std::invalid_argument(std::string("missing required path: --") + flag);
    }
}

std::vector<std::string> read_seed_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seeds file: " + path);
    std::vector<std::string> seeds;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') seeds.push_back(line);
    }
    if (seeds.empty()) throw std::runtime_error("seeds file has no entries: " + path);
    return seeds;
}

struct LoadedModel {
    TripleStore store;
    ShardedMatrices kg;
    ModelParams params;
    TokenVocab vocab;
};

LoadedModel load_model(const RunConfig& config) {
    require_path(config.kg, "kg");
    require_path(config.checkpoint, "checkpoint");
    LoadedModel lm;
    lm.store = load_store_file(config.kg);
    auto loaded = load_checkpoint_file(config.checkpoint);
    lm.params = std::move(loaded.first);
    lm.vocab = std::move(loaded.second);
    if (lm.params.config.n_entities != lm.store.n_entities() ||
        lm.params.config.n_relations != lm.store.n_relations()) {
        throw std::runtime_error(
            "checkpoint was trained on a different graph: expects " +
            std::to_string(lm.params.config.n_entities) + " entities / " +
            std::to_string(lm.params.config.n_relations) + " relations, store has " +
            std::to_string(lm.store.n_entities()) + " / " +
            std::to_string(lm.store.n_relations()));
    }
    lm.kg = shard(reify(lm.store), config.shards);
    return lm;
}

}  // namespace

TripleStore cmd_build_kg(const BuildKgArgs& args, std::ostream& out) {
    require_path(args.input, "input");
    require_path(args.output, "output");
    TripleStore store = ingest_triples_file(args.input);
    if (args.add_inverses) store = add_inverse_relations(store);
    if (!args.seeds_file.empty()) {
        if (args.hops == 0) throw std::invalid_argument("--hops must be positive");
        store = extract_subgraph(store, read_seed_lines(args.seeds_file), args.hops);
    }
    save_store_file(store, args.output);
    out << "built kg: entities=" << store.n_entities() << " relations=" << store.n_relations()
        << " triples=" << store.n_triples() << "\n";
    return store;
}

SyntheticData cmd_gen_data(const GenDataArgs& args, std::ostream& out) {
    require_path(args.kg_output, "kg-output");
    require_path(args.train_output, "train-output");
    require_path(args.dev_output, "dev-output");
    require_path(args.test_output, "test-output");

    SyntheticData data = generate_synthetic(args.spec, args.seed);
    {
        std::ofstream kg_out(args.kg_output);
        if (!kg_out) throw std::runtime_error("cannot open for writing: " + args.kg_output);
        write_triples_tsv(data.kg, kg_out);
    }
    save_dataset_file(data.train, data.kg, args.train_output);
    save_dataset_file(data.dev, data.kg, args.dev_output);
    save_dataset_file(data.test, data.kg, args.test_output);
    out << "generated: triples=" << data.kg.n_triples() << " train=" << data.train.size()
        << " dev=" << data.dev.size() << " test=" << data.test.size() << "\n";
    return data;
}

TrainResult cmd_train(const RunConfig& config, std::ostream& out) {
    validate_run_config(config);
    require_path(config.kg, "kg");
    require_path(config.dataset, "dataset");
    require_path(config.checkpoint, "checkpoint");

    const TripleStore store = load_store_file(config.kg);
    const ShardedMatrices kg = shard(reify(store), config.shards);
    const auto train_set = load_dataset_file(config.dataset, store);
    const std::vector<QuestionSample> dev_set =
        config.dev.empty() ? std::vector<QuestionSample>{}
                           : load_dataset_file(config.dev, store);
    const TokenVocab vocab = build_vocab(train_set);

    TrainResult result = train(config, store, kg, vocab, train_set, dev_set);
    save_checkpoint_file(result.best_params, vocab, config.checkpoint);
    if (!config.metrics_log.empty()) {
        std::ofstream log(config.metrics_log);
        if (!log) throw std::runtime_error("cannot open for writing: " + config.metrics_log);
        for (const auto& line : result.log_lines) log << line << '\n';
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "trained %zu steps: best dev_hits1=%.6f at step=%zu\n",
                  config.steps, result.best_dev_hits1, result.best_step);
    out << buf;
    return result;
}

EvalReport cmd_eval(const RunConfig& config, std::ostream& out) {
    require_path(config.dataset, "dataset");
    const LoadedModel lm = load_model(config);
    const auto samples = load_dataset_file(config.dataset, lm.store);
    EvalReport report = evaluate(lm.params, lm.kg, lm.store, lm.vocab, samples);
    if (!config.report.empty()) {
        std::ofstream rep(config.report);
        if (!rep) throw std::runtime_error("cannot open for writing: " + config.report);
        rep << report_to_json(report, lm.store);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "hits@1 overall=%.6f one_entity=%.6f multi_entity=%.6f n=%zu\n",
                  report.overall.hits_at_1(), report.one_entity.hits_at_1(),
                  report.multi_entity.hits_at_1(), report.overall.count);
    out << buf;
    return report;
}

void cmd_explain(const RunConfig& config, std::ostream& out) {
    require_path(config.dataset, "dataset");
    const LoadedModel lm = load_model(config);
    const auto samples = load_dataset_file(config.dataset, lm.store);
    if (config.index >= samples.size()) {
        throw std::invalid_argument("sample index " + std::to_string(config.index) +
                                    " out of range (dataset has " +
                                    std::to_string(samples.size()) + " samples)");
    }
    const Explanation ex =
        explain_sample(lm.params, lm.kg, lm.vocab, samples[config.index]);
    for (const auto& line : format_explanation(ex, lm.store)) out << line << '\n';
}

}  // namespace dkgqa
