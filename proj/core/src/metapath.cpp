#include "peagnn/metapath.hpp"

#include <algorithm>
#include <cctype>

#include "peagnn/errors.hpp"

namespace peagnn {

std::string type_initial(const std::string& type_name) {
    if (type_name.empty()) return "?";
    // movies print as M to match the U-M-U naming convention
    if (type_name == "movie" || type_name == "item") return "M";
    std::string s(1, static_cast<char>(std::toupper(static_cast<unsigned char>(type_name[0]))));
    return s;
}

namespace {

std::size_t resolve_type_token(const Hin& hin, const std::string& token) {
    std::string lowered = token;
    for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (auto t = hin.find_type(lowered)) return *t;
    std::vector<std::size_t> matches;
    for (std::size_t t = 0; t < hin.types.size(); ++t) {
        if (type_initial(hin.types[t].name) == token ||
            (token.size() == 1 &&
             std::toupper(static_cast<unsigned char>(token[0])) ==
                 type_initial(hin.types[t].name)[0]))
            matches.push_back(t);
    }
    if (matches.size() == 1) return matches[0];
    if (matches.empty())
        throw ConfigError("metapath token '" + token + "' matches no node type");
    throw ConfigError("metapath token '" + token + "' is ambiguous; use the full type name");
}

std::string build_name(const Hin& hin, const std::vector<std::size_t>& type_seq) {
    std::string name;
    for (std::size_t i = 0; i < type_seq.size(); ++i) {
        if (i) name += "-";
        name += type_initial(hin.types[type_seq[i]].name);
    }
    return name;
}

Metapath from_type_sequence(const Hin& hin, const std::vector<std::size_t>& type_seq) {
    if (type_seq.size() < 2) throw ConfigError("metapath needs at least two node types");
    Metapath mp;
    mp.name = build_name(hin, type_seq);
    for (std::size_t i = 0; i + 1 < type_seq.size(); ++i) {
        const Relation* rel = hin.relation_between(type_seq[i], type_seq[i + 1]);
        if (!rel)
            throw ConfigError("metapath '" + mp.name + "': no relation connects '" +
                              hin.types[type_seq[i]].name + "' and '" +
                              hin.types[type_seq[i + 1]].name + "'");
        mp.steps.push_back({type_seq[i], type_seq[i + 1], rel->name});
    }
    return mp;
}

}  // namespace

Metapath parse_metapath(const Hin& hin, const std::string& schema) {
    std::vector<std::size_t> type_seq;
    std::string token;
    for (char c : schema + "-") {
        if (c == '-') {
            if (token.empty()) throw ConfigError("empty token in metapath '" + schema + "'");
            type_seq.push_back(resolve_type_token(hin, token));
            token.clear();
        } else {
            token += c;
        }
    }
    Metapath mp = from_type_sequence(hin, type_seq);
    validate_metapath(mp, hin);
    return mp;
}

Metapath parse_metapath_triples(const Hin& hin,
                                const std::vector<std::vector<std::string>>& steps) {
    if (steps.empty()) throw ConfigError("metapath step list is empty");
    Metapath mp;
    std::vector<std::size_t> type_seq;
    for (const auto& s : steps) {
        if (s.size() != 3)
            throw ConfigError("metapath step must be [src_type, relation, dst_type]");
        const std::size_t src = resolve_type_token(hin, s[0]);
        const std::size_t dst = resolve_type_token(hin, s[2]);
        if (type_seq.empty()) type_seq.push_back(src);
        type_seq.push_back(dst);
        mp.steps.push_back({src, dst, s[1]});
    }
    mp.name = build_name(hin, type_seq);
    validate_metapath(mp, hin);
    return mp;
}

void validate_metapath(const Metapath& mp, const Hin& hin) {
    if (mp.steps.empty()) throw ConfigError("metapath '" + mp.name + "' has no steps");
    for (std::size_t i = 0; i < mp.steps.size(); ++i) {
        const auto& s = mp.steps[i];
        if (s.src_type >= hin.types.size() || s.dst_type >= hin.types.size())
            throw ConfigError("metapath '" + mp.name + "' references an unknown node type");
        if (i + 1 < mp.steps.size() && s.dst_type != mp.steps[i + 1].src_type)
            throw ConfigError("metapath '" + mp.name + "' breaks the chain at step " +
                              std::to_string(i + 1));
        const Relation* rel = hin.find_relation(s.relation);
        if (!rel)
            throw ConfigError("metapath '" + mp.name + "' names unknown relation '" +
                              s.relation + "'");
        const bool forward = rel->src_type == s.src_type && rel->dst_type == s.dst_type;
        const bool reverse = rel->src_type == s.dst_type && rel->dst_type == s.src_type;
        if (!forward && !reverse)
            throw ConfigError("metapath '" + mp.name + "': relation '" + s.relation +
                              "' does not connect '" + hin.types[s.src_type].name + "' to '" +
                              hin.types[s.dst_type].name + "'");
    }
    const NodeRole last = hin.types[mp.terminal_type()].role;
    if (last != NodeRole::User && last != NodeRole::Item)
        throw ConfigError("metapath '" + mp.name + "' must end at a user or item type, ends at '" +
                          hin.types[mp.terminal_type()].name + "'");
}

std::vector<Metapath> default_metapaths_movielens(const Hin& hin) {
    std::vector<std::string> schemas = {"U-M-U", "M-U-M", "Y-M-U"};
    if (hin.find_type("actor")) schemas.push_back("A-M-U");
    if (hin.find_type("writer")) schemas.push_back("W-M-U");
    if (hin.find_type("director")) schemas.push_back("D-M-U");
    schemas.insert(schemas.end(), {"G-M-U", "T-M-U", "T-U-M"});

    std::vector<Metapath> out;
    for (const auto& s : schemas) out.push_back(parse_metapath(hin, s));
    return out;
}

StepAdjacency derive_step_adjacencies(const Metapath& mp, const Hin& hin) {
    validate_metapath(mp, hin);
    const std::size_t v = hin.n_nodes();
    StepAdjacency adj;
    for (const auto& s : mp.steps) {
        const Relation* rel = hin.find_relation(s.relation);
        const bool forward = rel->src_type == s.src_type && rel->dst_type == s.dst_type;
        const std::size_t src_begin = hin.types[s.src_type].begin;
        const std::size_t dst_begin = hin.types[s.dst_type].begin;
        std::vector<Coo<float>> edges;
        edges.reserve(rel->csr.nnz());
        for (std::size_t i = 0; i < rel->csr.n_rows; ++i) {
            for (std::size_t k = rel->csr.row_ptr[i]; k < rel->csr.row_ptr[i + 1]; ++k) {
                const std::size_t j = rel->csr.col_idx[k];
                // rows are targets: information flows source -> target
                const std::size_t src = forward ? src_begin + i : src_begin + j;
                const std::size_t dst = forward ? dst_begin + j : dst_begin + i;
                edges.push_back({dst, src, 1.0f});
            }
        }
        Csr m = csr_from_edges(v, v, std::move(edges));
        std::fill(m.values.begin(), m.values.end(), 1.0f);  // binary pattern
        adj.hops.push_back(std::move(m));
    }
    return adj;
}

}  // namespace peagnn
