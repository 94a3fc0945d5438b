#pragma once
// Command implementations behind the CLI subcommands. Each function does the
// file plumbing around the library calls and returns its in-memory result so
// tests can drive the exact code path the binary runs.

#include <iosfwd>
#include <string>

#include "dkgqa/config.hpp"
#include "dkgqa/eval.hpp"
#include "dkgqa/synthetic.hpp"
#include "dkgqa/train.hpp"

namespace dkgqa {

struct BuildKgArgs {
    std::string input;       // TSV triples, one per line
    std::string output;      // serialized store
    std::string seeds_file;  // optional: one entity name per line
    std::size_t hops = 2;    // subgraph radius when seeds are given
    bool add_inverses = true;
};

// Ingest, optionally add inverse relations, optionally cut the seed subgraph,
// then serialize. Returns the stored graph; prints a one-line summary.
TripleStore cmd_build_kg(const BuildKgArgs& args, std::ostream& out);

struct GenDataArgs {
    GeneratorSpec spec;
    std::uint64_t seed = 1;
    std::string kg_output;     // TSV triples
    std::string train_output;  // dataset files, one JSON record per line
    std::string dev_output;
    std::string test_output;
};

SyntheticData cmd_gen_data(const GenDataArgs& args, std::ostream& out);

// Trains from config.kg/config.dataset (dev split optional), writes the
// best-dev checkpoint and the metrics log.
TrainResult cmd_train(const RunConfig& config, std::ostream& out);

// Evaluates config.checkpoint on config.dataset; the model variant comes from
// the checkpoint. Writes the JSON report when config.report is set.
EvalReport cmd_eval(const RunConfig& config, std::ostream& out);

// Prints the inference chains for sample config.index.
void cmd_explain(const RunConfig& config, std::ostream& out);

}  // namespace dkgqa
