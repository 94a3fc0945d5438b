#pragma once
// TripleStore: entity/relation vocabularies plus the deduplicated list of
// (subject, relation, object) index triples. Source of truth for the graph.
//
// Vocabulary order is first-appearance so a run is reproducible from the
// same input file. Immutable once built; safe to share across readers.
//
// Serialized form (.dkg): magic "DKG1", little-endian u64 counts, the two
// length-prefixed vocabularies, then the triple index array (u64 s, p, o
// per triple).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dkgqa {

// Relation prefix that marks the reversed copy of an edge.
inline constexpr const char* kInversePrefix = "<inv>-";

struct Triple {
    std::uint32_t s = 0;
    std::uint32_t p = 0;
    std::uint32_t o = 0;
    bool operator==(const Triple&) const = default;
};

class TripleStore {
public:
    // Adds the identifier if unseen; returns its index either way.
    std::uint32_t intern_entity(const std::string& name);
    std::uint32_t intern_relation(const std::string& name);

    // Exact-match dedup, first occurrence wins. Returns false on duplicate.
    bool add_triple(const std::string& s, const std::string& p, const std::string& o);
    bool add_triple(std::uint32_t s, std::uint32_t p, std::uint32_t o);

    std::size_t n_entities() const { return entities_.size(); }
    std::size_t n_relations() const { return relations_.size(); }
    std::size_t n_triples() const { return triples_.size(); }

    const std::vector<Triple>& triples() const { return triples_; }
    const std::vector<std::string>& entities() const { return entities_; }
    const std::vector<std::string>& relations() const { return relations_; }

    const std::string& entity_name(std::uint32_t i) const { return entities_[i]; }
    const std::string& relation_name(std::uint32_t i) const { return relations_[i]; }

    // -1 if absent.
    std::int64_t entity_id(const std::string& name) const;
    std::int64_t relation_id(const std::string& name) const;

    bool has_triple(std::uint32_t s, std::uint32_t p, std::uint32_t o) const;

private:
    std::vector<std::string> entities_;
    std::vector<std::string> relations_;
    std::unordered_map<std::string, std::uint32_t> entity_ids_;
    std::unordered_map<std::string, std::uint32_t> relation_ids_;
    std::vector<Triple> triples_;

    struct TripleHash {
        std::size_t operator()(const Triple& t) const {
            std::uint64_t h = t.s;
            h = h * 0x9e3779b97f4a7c15ull + t.p;
            h = h * 0x9e3779b97f4a7c15ull + t.o;
            return static_cast<std::size_t>(h ^ (h >> 32));
        }
    };
    std::unordered_set<Triple, TripleHash> seen_;
};

// Reads `subject<TAB>relation<TAB>object` lines. Empty lines and lines
// starting with '#' are ignored. Wrong field count or an empty field is a
// parse error naming the 1-based line number.
TripleStore ingest_triples(std::istream& in);
TripleStore ingest_triples_file(const std::string& path);

// For every relation p adds `<inv>-p`, and for every triple (s,p,o) adds
// (o,<inv>-p,s). Throws if any existing relation already carries the prefix.
TripleStore add_inverse_relations(const TripleStore& store);

// Frontier expansion over triple subjects: hop 1 keeps triples whose subject
// is a seed, hop k keeps triples whose subject was reached as an object
// earlier. Kept triples are then closed under the <inv>- dual, so an edge and
// its reversed copy travel together. Vocabularies are re-compacted in
// first-appearance order over the kept triples.
TripleStore extract_subgraph(const TripleStore& store,
                             const std::vector<std::string>& seeds,
                             std::size_t hops);

void save_store(const TripleStore& store, std::ostream& out);
void save_store_file(const TripleStore& store, const std::string& path);
TripleStore load_store(std::istream& in);
TripleStore load_store_file(const std::string& path);

// One `s<TAB>p<TAB>o` line per triple.
void write_triples_tsv(const TripleStore& store, std::ostream& out);

}  // namespace dkgqa
