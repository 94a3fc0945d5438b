#include "dkgqa/triple_store.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dkgqa/io.hpp"

namespace dkgqa {

std::uint32_t TripleStore::intern_entity(const std::string& name) {
    auto it = entity_ids_.find(name);
    if (it != entity_ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(entities_.size());
    entities_.push_back(name);
    entity_ids_.emplace(name, id);
    return id;
}

std::uint32_t TripleStore::intern_relation(const std::string& name) {
    auto it = relation_ids_.find(name);
    if (it != relation_ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(relations_.size());
    relations_.push_back(name);
    relation_ids_.emplace(name, id);
    return id;
}

bool TripleStore::add_triple(const std::string& s, const std::string& p, const std::string& o) {
    const auto si = intern_entity(s);
    const auto pi = intern_relation(p);
    const auto oi = intern_entity(o);
    return add_triple(si, pi, oi);
}

bool TripleStore::add_triple(std::uint32_t s, std::uint32_t p, std::uint32_t o) {
    if (s >= entities_.size() || o >= entities_.size() || p >= relations_.size()) {
        throw std::invalid_argument("add_triple: index outside vocabulary bounds");
    }
    const Triple t{s, p, o};
    if (!seen_.insert(t).second) return false;
    triples_.push_back(t);
    return true;
}

std::int64_t TripleStore::entity_id(const std::string& name) const {
    auto it = entity_ids_.find(name);
    return it == entity_ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::int64_t TripleStore::relation_id(const std::string& name) const {
    auto it = relation_ids_.find(name);
    return it == relation_ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

bool TripleStore::has_triple(std::uint32_t s, std::uint32_t p, std::uint32_t o) const {
    return seen_.contains(Triple{s, p, o});
}

namespace {

// Splits on '\t'; returns false unless exactly three non-empty fields.
bool split_triple_line(const std::string& line, std::string out[3]) {
    std::size_t start = 0;
    int field = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            if (field >= 3) return false;
            out[field++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    return field == 3 && !out[0].empty() && !out[1].empty() && !out[2].empty();
}

}  // namespace

TripleStore ingest_triples(std::istream& in) {
    TripleStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::string f[3];
        if (!split_triple_line(line, f)) {
            throw std::runtime_error("triple ingestion: line " + std::to_string(line_no) +
                                     ": expected 3 non-empty tab-separated fields");
        }
        store.add_triple(f[0], f[1], f[2]);
    }
    return store;
}

TripleStore ingest_triples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open triple file: " + path);
    return ingest_triples(in);
}

TripleStore add_inverse_relations(const TripleStore& store) {
    for (const auto& rel : store.relations()) {
        if (rel.starts_with(kInversePrefix)) {
            throw std::invalid_argument("add_inverse_relations: relation '" + rel +
                                        "' already carries the inverse prefix");
        }
    }
    TripleStore out;
    for (const auto& e : store.entities()) out.intern_entity(e);
    for (const auto& r : store.relations()) out.intern_relation(r);
    for (const auto& r : store.relations()) out.intern_relation(kInversePrefix + r);
    const auto n_rel = static_cast<std::uint32_t>(store.n_relations());
    for (const auto& t : store.triples()) out.add_triple(t.s, t.p, t.o);
    for (const auto& t : store.triples()) out.add_triple(t.o, t.p + n_rel, t.s);
    return out;
}

TripleStore extract_subgraph(const TripleStore& store,
                             const std::vector<std::string>& seeds,
                             std::size_t hops) {
    if (seeds.empty()) throw std::invalid_argument("extract_subgraph: empty seed set");
    if (hops < 1) throw std::invalid_argument("extract_subgraph: hops must be >= 1");

    std::vector<char> reached(store.n_entities(), 0);
    for (const auto& name : seeds) {
        const auto id = store.entity_id(name);
        if (id < 0) throw std::invalid_argument("extract_subgraph: unknown seed entity '" + name + "'");
        reached[static_cast<std::size_t>(id)] = 1;
    }

    const auto& triples = store.triples();
    std::vector<char> kept(triples.size(), 0);
    for (std::size_t hop = 0; hop < hops; ++hop) {
        std::vector<std::uint32_t> new_objects;
        for (std::size_t i = 0; i < triples.size(); ++i) {
            if (kept[i] || !reached[triples[i].s]) continue;
            kept[i] = 1;
            new_objects.push_back(triples[i].o);
        }
        bool grew = false;
        for (auto o : new_objects) {
            if (!reached[o]) { reached[o] = 1; grew = true; }
        }
        if (!grew && hop + 1 < hops) break;  // frontier exhausted
    }

    // Close under the reversed-edge dual so both directions of a kept fact
    // survive together.
    for (std::size_t i = 0; i < triples.size(); ++i) {
        if (!kept[i]) continue;
        const auto& t = triples[i];
        const std::string& rel = store.relation_name(t.p);
        const std::string dual_name = rel.starts_with(kInversePrefix)
                                          ? rel.substr(std::string(kInversePrefix).size())
                                          : kInversePrefix + rel;
        const auto dual_rel = store.relation_id(dual_name);
        if (dual_rel < 0) continue;
        for (std::size_t j = 0; j < triples.size(); ++j) {
            if (!kept[j] && triples[j].s == t.o &&
                triples[j].p == static_cast<std::uint32_t>(dual_rel) && triples[j].o == t.s) {
                kept[j] = 1;
            }
        }
    }

    TripleStore out;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        if (!kept[i]) continue;
        const auto& t = triples[i];
        out.add_triple(store.entity_name(t.s), store.relation_name(t.p), store.entity_name(t.o));
    }
    return out;
}

void save_store(const TripleStore& store, std::ostream& out) {
    write_magic(out, "DKG1");
    write_u64(out, store.n_entities());
    write_u64(out, store.n_relations());
    write_u64(out, store.n_triples());
    for (const auto& e : store.entities()) write_string(out, e);
    for (const auto& r : store.relations()) write_string(out, r);
    for (const auto& t : store.triples()) {
        write_u64(out, t.s);
        write_u64(out, t.p);
        write_u64(out, t.o);
    }
}

void save_store_file(const TripleStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_store(store, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TripleStore load_store(std::istream& in) {
    expect_magic(in, "DKG1", "knowledge-graph store");
    const auto n_e = read_u64(in);
    const auto n_r = read_u64(in);
    const auto n_t = read_u64(in);
    TripleStore store;
    for (std::uint64_t i = 0; i < n_e; ++i) store.intern_entity(read_string(in));
    for (std::uint64_t i = 0; i < n_r; ++i) store.intern_relation(read_string(in));
    if (store.n_entities() != n_e || store.n_relations() != n_r) {
        throw std::runtime_error("knowledge-graph store: duplicate vocabulary entries");
    }
    for (std::uint64_t i = 0; i < n_t; ++i) {
        const auto s = read_u64(in);
        const auto p = read_u64(in);
        const auto o = read_u64(in);
        if (s >= n_e || o >= n_e || p >= n_r) {
            throw std::runtime_error("knowledge-graph store: triple index out of bounds");
        }
        store.add_triple(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(p),
                         static_cast<std::uint32_t>(o));
    }
    if (store.n_triples() != n_t) {
        throw std::runtime_error("knowledge-graph store: duplicate triples in file");
    }
    return store;
}

TripleStore load_store_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open knowledge-graph store: " + path);
    return load_store(in);
}

void write_triples_tsv(const TripleStore& store, std::ostream& out) {
    for (const auto& t : store.triples()) {
        out << store.entity_name(t.s) << '\t' << store.relation_name(t.p) << '\t'
            << store.entity_name(t.o) << '\n';
    }
}

}  // namespace dkgqa
