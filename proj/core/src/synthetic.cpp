#include "dkgqa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dkgqa {

namespace {

std::string padded_name(const char* prefix, std::size_t i) {
    std::string num = std::to_string(i);
    if (num.size() < 2) num.insert(num.begin(), '0');
    return prefix + num;
}

// Set-valued traversal used to verify every emitted sample.
std::set<std::uint32_t> support_follow(const TripleStore& store,
                                       const std::set<std::uint32_t>& from,
                                       std::uint32_t rel) {
    std::set<std::uint32_t> out;
    for (const auto& t : store.triples()) {
        if (t.p == rel && from.contains(t.s)) out.insert(t.o);
    }
    return out;
}

struct Casting {
    std::uint32_t actor;
    std::uint32_t film;
    std::uint32_t character;
};

// Question templates; $0 and $1 are replaced by mention tokens.
using Template = std::vector<const char*>;

const std::vector<Template> kActorCharacterTemplates = {
    {"which", "characters", "did", "$0", "play"},
    {"what", "characters", "does", "$0", "portray"},
    {"name", "the", "roles", "of", "$0"},
    {"what", "parts", "did", "$0", "take"},
    {"which", "roles", "does", "$0", "perform"},
    {"list", "all", "characters", "of", "$0"},
};

const std::vector<Template> kFilmCharacterTemplates = {
    {"which", "characters", "are", "in", "$0"},
    {"which", "characters", "occur", "in", "$0"},
    {"name", "the", "roles", "featured", "by", "$0"},
    {"what", "parts", "exist", "in", "$0"},
    {"list", "the", "characters", "of", "$0"},
    {"which", "figures", "populate", "$0"},
};

const std::vector<Template> kCharacterActorTemplates = {
    {"who", "played", "$0"},
    {"which", "actor", "portrayed", "$0"},
    {"who", "acted", "as", "$0"},
    {"which", "performer", "plays", "$0"},
    {"who", "takes", "the", "part", "of", "$0"},
    {"name", "the", "actor", "behind", "$0"},
};

const std::vector<Template> kCharacterFilmTemplates = {
    {"which", "film", "features", "$0"},
    {"what", "movie", "contains", "$0"},
    {"in", "which", "film", "does", "$0", "appear"},
    {"which", "movie", "shows", "$0"},
    {"name", "the", "film", "with", "$0"},
    {"what", "picture", "includes", "$0"},
};

const std::vector<Template> kActorFilmTemplates = {
    {"which", "films", "did", "$0", "appear", "in"},
    {"what", "movies", "star", "$0"},
    {"name", "the", "films", "of", "$0"},
    {"which", "movies", "feature", "$0"},
    {"what", "films", "include", "$0"},
    {"list", "the", "movies", "with", "$0"},
};

const std::vector<Template> kFilmActorTemplates = {
    {"which", "actors", "appear", "in", "$0"},
    {"who", "stars", "in", "$0"},
    {"name", "the", "cast", "of", "$0"},
    {"which", "performers", "are", "in", "$0"},
    {"who", "acts", "in", "$0"},
    {"list", "the", "actors", "of", "$0"},
};

const std::vector<Template> kIntersectionTemplates = {
    {"who", "did", "$0", "play", "in", "$1"},
    {"which", "character", "did", "$0", "portray", "in", "$1"},
    {"what", "role", "does", "$0", "take", "in", "$1"},
    {"which", "part", "did", "$0", "perform", "in", "$1"},
    {"who", "is", "$0", "in", "$1"},
    {"what", "character", "does", "$0", "act", "as", "in", "$1"},
};

const std::vector<Template> kOneBranchTemplates = {
    {"who", "played", "$0", "in", "$1"},
    {"which", "actor", "portrayed", "$0", "in", "$1"},
    {"who", "acted", "as", "$0", "in", "$1"},
    {"which", "performer", "plays", "$0", "in", "$1"},
    {"who", "appears", "as", "$0", "in", "$1"},
    {"name", "the", "actor", "behind", "$0", "in", "$1"},
};

std::vector<std::string> instantiate(const Template& tpl, const TripleStore& store,
                                     const std::vector<std::uint32_t>& mentions) {
    std::vector<std::string> tokens;
    for (const char* word : tpl) {
        if (word[0] == '$') {
            const std::size_t k = static_cast<std::size_t>(word[1] - '0');
            tokens.push_back(store.entity_name(mentions.at(k)));
        } else {
            tokens.push_back(word);
        }
    }
    return tokens;
}

QuestionSample make_sample(const TripleStore& store, const Template& tpl,
                           const std::vector<std::uint32_t>& entities,
                           const std::set<std::uint32_t>& answers, std::uint32_t hops) {
    QuestionSample s;
    s.question_tokens = instantiate(tpl, store, entities);
    for (auto e : entities) {
        s.entities.push_back(QuestionEntity{e, {store.entity_name(e)}});
    }
    s.answers.assign(answers.begin(), answers.end());
    s.hops = hops;
    if (s.answers.empty()) {
        throw std::logic_error("synthetic generator: produced a sample with no answers");
    }
    return s;
}

[[noreturn]] void constraint_error(const std::string& what) {
    throw std::invalid_argument("synthetic generator: " + what);
}

}  // namespace

SyntheticData generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed) {
    if (spec.n_actors == 0 || spec.n_films == 0 || spec.n_characters == 0) {
        constraint_error("all entity counts must be positive");
    }
    if (!(spec.two_entity_fraction >= 0.0 && spec.two_entity_fraction <= 1.0)) {
        constraint_error("two_entity_fraction must lie in [0, 1]");
    }
    if (spec.n_characters < 2 * spec.n_films) {
        constraint_error("every film needs >= 2 characters: n_characters < 2 * n_films");
    }
    if (spec.n_characters > 4 * spec.n_films) {
        constraint_error("films hold at most 4 characters: n_characters > 4 * n_films");
    }
    if (spec.n_characters < 2 * spec.n_actors) {
        constraint_error("every actor needs >= 2 castings: n_characters < 2 * n_actors");
    }

    std::mt19937_64 rng(seed);

    // Film sizes: start at 2, spread the remainder in shuffled film order.
    std::vector<std::size_t> film_size(spec.n_films, 2);
    std::vector<std::size_t> film_order(spec.n_films);
    std::iota(film_order.begin(), film_order.end(), 0);
    std::shuffle(film_order.begin(), film_order.end(), rng);
    std::size_t remainder = spec.n_characters - 2 * spec.n_films;
    for (std::size_t idx = 0; remainder > 0; ++idx) {
        const std::size_t f = film_order[idx % spec.n_films];
        if (film_size[f] < 4) {
            film_size[f] += 1;
            remainder -= 1;
        }
    }
    const std::size_t max_size = *std::max_element(film_size.begin(), film_size.end());
    if (spec.n_actors < max_size) {
        constraint_error("within-film actors must be distinct: n_actors < largest film size");
    }

    // Interning order: all actors, then films, then characters, so entity
    // indices are stable regardless of casting layout.
    TripleStore kg;
    std::vector<std::uint32_t> actor_id, film_id, char_id;
    for (std::size_t i = 0; i < spec.n_actors; ++i) {
        actor_id.push_back(kg.intern_entity(padded_name("actor", i)));
    }
    for (std::size_t i = 0; i < spec.n_films; ++i) {
        film_id.push_back(kg.intern_entity(padded_name("film", i)));
    }
    for (std::size_t i = 0; i < spec.n_characters; ++i) {
        char_id.push_back(kg.intern_entity(padded_name("char", i)));
    }
    const std::uint32_t rel_played = kg.intern_relation("played");
    const std::uint32_t rel_character = kg.intern_relation("character");

    std::vector<std::uint32_t> char_perm = char_id;
    std::shuffle(char_perm.begin(), char_perm.end(), rng);
    std::vector<std::uint32_t> actor_cycle = actor_id;
    std::shuffle(actor_cycle.begin(), actor_cycle.end(), rng);

    std::vector<Casting> castings;
    std::size_t char_cursor = 0;
    std::size_t actor_cursor = 0;
    for (std::size_t f = 0; f < spec.n_films; ++f) {
        for (std::size_t k = 0; k < film_size[f]; ++k) {
            Casting c{actor_cycle[actor_cursor % spec.n_actors], film_id[f],
                      char_perm[char_cursor]};
            ++actor_cursor;
            ++char_cursor;
            castings.push_back(c);
            kg.add_triple(c.actor, rel_played, c.character);
            kg.add_triple(c.film, rel_character, c.character);
        }
    }

    // All answer sets are read off the inverse-closed graph, the same form the
    // model sees after KG building.
    const TripleStore full = add_inverse_relations(kg);
    const auto rid = [&full](const std::string& name) {
        const auto id = full.relation_id(name);
        if (id < 0) throw std::logic_error("synthetic generator: missing relation " + name);
        return static_cast<std::uint32_t>(id);
    };
    const std::uint32_t r_played = rid("played");
    const std::uint32_t r_character = rid("character");
    const std::uint32_t r_inv_played = rid(std::string(kInversePrefix) + "played");
    const std::uint32_t r_inv_character = rid(std::string(kInversePrefix) + "character");

    const auto from = [](std::uint32_t e) { return std::set<std::uint32_t>{e}; };

    std::vector<QuestionSample> one_entity_pool;
    std::vector<QuestionSample> two_entity_pool;

    for (auto a : actor_id) {
        const auto chars = support_follow(full, from(a), r_played);
        const auto films = support_follow(full, chars, r_inv_character);
        if (chars.size() < 2 || films.size() < 2) {
            throw std::logic_error("synthetic generator: actor with fewer than two castings");
        }
        for (const auto& tpl : kActorCharacterTemplates) {
            one_entity_pool.push_back(make_sample(kg, tpl, {a}, chars, 1));
        }
        for (const auto& tpl : kActorFilmTemplates) {
            one_entity_pool.push_back(make_sample(kg, tpl, {a}, films, 2));
        }
    }
    for (auto f : film_id) {
        const auto chars = support_follow(full, from(f), r_character);
        const auto actors = support_follow(full, chars, r_inv_played);
        if (chars.size() < 2 || actors.size() < 2) {
            throw std::logic_error("synthetic generator: film with fewer than two castings");
        }
        for (const auto& tpl : kFilmCharacterTemplates) {
            one_entity_pool.push_back(make_sample(kg, tpl, {f}, chars, 1));
        }
        for (const auto& tpl : kFilmActorTemplates) {
            one_entity_pool.push_back(make_sample(kg, tpl, {f}, actors, 2));
        }
    }
    for (auto c : char_id) {
        const auto actors = support_follow(full, from(c), r_inv_played);
        const auto films = support_follow(full, from(c), r_inv_character);
        if (actors.size() != 1 || films.size() != 1) {
            throw std::logic_error("synthetic generator: character not cast exactly once");
        }
        for (const auto& tpl : kCharacterActorTemplates) {
            one_entity_pool.push_back(make_sample(kg, tpl, {c}, actors, 1));
        }
        for (const auto& tpl : kCharacterFilmTemplates) {
            one_entity_pool.push_back(make_sample(kg, tpl, {c}, films, 1));
        }
    }

    for (const auto& casting : castings) {
        // Type (c): both branch candidate sets must have >= 2 entries and a
        // singleton intersection, so intersection is required.
        const auto actor_chars = support_follow(full, from(casting.actor), r_played);
        const auto film_chars = support_follow(full, from(casting.film), r_character);
        std::set<std::uint32_t> shared;
        std::set_intersection(actor_chars.begin(), actor_chars.end(), film_chars.begin(),
                              film_chars.end(), std::inserter(shared, shared.begin()));
        if (actor_chars.size() < 2 || film_chars.size() < 2 || shared.size() != 1 ||
            !shared.contains(casting.character)) {
            throw std::logic_error("synthetic generator: intersection ambiguity check failed");
        }
        for (const auto& tpl : kIntersectionTemplates) {
            two_entity_pool.push_back(
                make_sample(kg, tpl, {casting.actor, casting.film}, shared, 1));
        }

        // Type (d): the character branch alone pins down the answer.
        const auto char_actor = support_follow(full, from(casting.character), r_inv_played);
        if (char_actor.size() != 1 || !char_actor.contains(casting.actor)) {
            throw std::logic_error("synthetic generator: one-branch answer check failed");
        }
        for (const auto& tpl : kOneBranchTemplates) {
            two_entity_pool.push_back(
                make_sample(kg, tpl, {casting.character, casting.film}, char_actor, 2));
        }
    }

    std::shuffle(one_entity_pool.begin(), one_entity_pool.end(), rng);
    std::shuffle(two_entity_pool.begin(), two_entity_pool.end(), rng);

    const std::size_t splits[3] = {spec.n_train, spec.n_dev, spec.n_test};
    std::size_t need_two = 0;
    std::size_t need_one = 0;
    for (const std::size_t n : splits) {
        const auto two = static_cast<std::size_t>(
            std::llround(spec.two_entity_fraction * static_cast<double>(n)));
        need_two += two;
        need_one += n - two;
    }
    if (need_two > two_entity_pool.size()) {
        constraint_error("not enough distinct two-entity questions (have " +
                         std::to_string(two_entity_pool.size()) + ", need " +
                         std::to_string(need_two) + ")");
    }
    if (need_one > one_entity_pool.size()) {
        constraint_error("not enough distinct one-entity questions (have " +
                         std::to_string(one_entity_pool.size()) + ", need " +
                         std::to_string(need_one) + ")");
    }

    SyntheticData data;
    data.kg = std::move(kg);
    std::size_t one_cursor = 0;
    std::size_t two_cursor = 0;
    std::vector<QuestionSample>* outs[3] = {&data.train, &data.dev, &data.test};
    for (std::size_t s = 0; s < 3; ++s) {
        const std::size_t n = splits[s];
        const auto two = static_cast<std::size_t>(
            std::llround(spec.two_entity_fraction * static_cast<double>(n)));
        for (std::size_t i = 0; i < two; ++i) outs[s]->push_back(two_entity_pool[two_cursor++]);
        for (std::size_t i = 0; i + two < n; ++i) {
            outs[s]->push_back(one_entity_pool[one_cursor++]);
        }
        std::shuffle(outs[s]->begin(), outs[s]->end(), rng);
    }
    return data;
}

}  // namespace dkgqa
