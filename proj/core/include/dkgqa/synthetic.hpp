#pragma once
// Synthetic actors/films/characters QA benchmark.
//
// The generated graph uses two relations: `played` (actor -> character) and
// `character` (film -> character). Characters partition across films (2..4
// per film); casting cycles a shuffled actor order, which guarantees distinct
// actors within a film, at least two films per actor, and at most one casting
// per (actor, film) pair. Those properties make the two-entity question pools
// sound:
//   type (c) "who did A play in F": both branch candidate sets have >= 2
//       entries, their intersection is a singleton (intersection required);
//   type (d) "who played C in F": the first branch alone is a singleton
//       (intersection not required).
// Single-entity pools cover both 1-hop directions of both relations plus the
// 2-hop actor->films and film->actors questions. Every emitted sample is
// checked against a set-traversal oracle before it is returned.

#include <cstdint>
#include <vector>

#include "dkgqa/dataset.hpp"
#include "dkgqa/triple_store.hpp"

namespace dkgqa {

struct GeneratorSpec {
    std::size_t n_actors = 10;
    std::size_t n_films = 12;
    std::size_t n_characters = 40;
    std::size_t n_train = 500;
    std::size_t n_dev = 100;
    std::size_t n_test = 100;
    double two_entity_fraction = 0.5;
};

struct SyntheticData {
    TripleStore kg;  // forward relations only; inverse relations are added at build time
    std::vector<QuestionSample> train;
    std::vector<QuestionSample> dev;
    std::vector<QuestionSample> test;
};

// Throws std::invalid_argument naming the violated constraint when the
// requested sizes cannot honor the ambiguity guarantees or fill the splits.
SyntheticData generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace dkgqa
