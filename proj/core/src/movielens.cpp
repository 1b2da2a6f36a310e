#include "peagnn/movielens.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "peagnn/csv.hpp"
#include "peagnn/errors.hpp"

namespace fs = std::filesystem;

namespace peagnn {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::int64_t parse_int(const std::string& s, const CsvReader& r, const char* what) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(trim(s), &pos);
        if (pos != trim(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IngestError(r.path() + ":" + std::to_string(r.line()) + ": bad " + what +
                          " value '" + s + "'");
    }
}

// trailing "(YYYY)" in the title; absent or malformed year -> no year edge
std::string extract_year(const std::string& title) {
    std::string t = trim(title);
    if (t.size() < 6 || t.back() != ')') return "";
    const std::size_t open = t.rfind('(');
    if (open == std::string::npos) return "";
    const std::string inside = t.substr(open + 1, t.size() - open - 2);
    if (inside.size() != 4) return "";
    for (char c : inside)
        if (!std::isdigit(static_cast<unsigned char>(c))) return "";
    return inside;
}

void expect_header(CsvReader& r, const std::string& expected_first) {
    std::vector<std::string> fields;
    if (!r.next(fields) || fields.empty() || trim(fields[0]) != expected_first)
        throw IngestError(r.path() + ":1: expected header starting with '" + expected_first + "'");
}

std::string relation_name_for_kind(const std::string& kind) {
    if (kind == "actor") return "acted_by";
    if (kind == "director") return "directed_by";
    if (kind == "writer") return "written_by";
    return "has_" + kind;
}

}  // namespace

Hin ingest_movielens_small(const std::string& data_dir) {
    const fs::path dir(data_dir);
    const std::string ratings_path = (dir / "ratings.csv").string();
    const std::string movies_path = (dir / "movies.csv").string();
    const std::string tags_path = (dir / "tags.csv").string();
    const std::string extra_path = (dir / "extra_features.tsv").string();
    for (const auto& p : {ratings_path, movies_path, tags_path})
        if (!fs::exists(p)) throw IngestError("missing input file " + p);

    // ---- raw rows -------------------------------------------------------
    struct RatingRow { std::int64_t user, movie, ts; };
    std::vector<RatingRow> ratings;
    {
        CsvReader r(ratings_path);
        expect_header(r, "userId");
        std::vector<std::string> f;
        while (r.next(f)) {
            if (f.size() == 1 && trim(f[0]).empty()) continue;
            if (f.size() < 4)
                throw IngestError(r.path() + ":" + std::to_string(r.line()) + ": expected 4 columns");
            ratings.push_back({parse_int(f[0], r, "userId"), parse_int(f[1], r, "movieId"),
                               parse_int(f[3], r, "timestamp")});
        }
        if (ratings.empty()) throw IngestError(ratings_path + ": no interactions");
    }

    struct MovieRow { std::int64_t movie; std::string year; std::vector<std::string> genres; };
    std::vector<MovieRow> movies;
    {
        CsvReader r(movies_path);
        expect_header(r, "movieId");
        std::vector<std::string> f;
        while (r.next(f)) {
            if (f.size() == 1 && trim(f[0]).empty()) continue;
            if (f.size() < 3)
                throw IngestError(r.path() + ":" + std::to_string(r.line()) + ": expected 3 columns");
            MovieRow row;
            row.movie = parse_int(f[0], r, "movieId");
            row.year = extract_year(f[1]);
            std::string g = f[2];
            std::size_t start = 0;
            while (start <= g.size()) {
                const std::size_t bar = g.find('|', start);
                const std::string one = trim(g.substr(start, bar == std::string::npos
                                                                  ? std::string::npos
                                                                  : bar - start));
                if (!one.empty() && one != "(no genres listed)") row.genres.push_back(one);
                if (bar == std::string::npos) break;
                start = bar + 1;
            }
            movies.push_back(std::move(row));
        }
    }

    struct TagRow { std::int64_t user, movie; std::string tag; };
    std::vector<TagRow> tags;
    {
        CsvReader r(tags_path);
        expect_header(r, "userId");
        std::vector<std::string> f;
        while (r.next(f)) {
            if (f.size() == 1 && trim(f[0]).empty()) continue;
            if (f.size() < 3)
                throw IngestError(r.path() + ":" + std::to_string(r.line()) + ": expected 4 columns");
            const std::string tag = lower(trim(f[2]));
            if (tag.empty()) continue;
            tags.push_back({parse_int(f[0], r, "userId"), parse_int(f[1], r, "movieId"), tag});
        }
    }

    struct ExtraRow { std::int64_t movie; std::string kind, value; };
    std::vector<ExtraRow> extras;
    if (fs::exists(extra_path)) {
        CsvReader r(extra_path, '\t');
        std::vector<std::string> f;
        while (r.next(f)) {
            if (f.size() == 1 && trim(f[0]).empty()) continue;
            if (f.size() < 3)
                throw IngestError(r.path() + ":" + std::to_string(r.line()) + ": expected 3 columns");
            if (trim(f[0]) == "movieId") continue;  // optional header
            const std::string kind = lower(trim(f[1]));
            const std::string value = trim(f[2]);
            if (kind.empty() || value.empty())
                throw IngestError(r.path() + ":" + std::to_string(r.line()) + ": empty kind/value");
            extras.push_back({parse_int(f[0], r, "movieId"), kind, value});
        }
    }

    // ---- node universe --------------------------------------------------
    std::set<std::int64_t> user_ids, movie_ids;
    for (const auto& x : ratings) { user_ids.insert(x.user); movie_ids.insert(x.movie); }
    for (const auto& x : tags) { user_ids.insert(x.user); movie_ids.insert(x.movie); }
    for (const auto& x : movies) movie_ids.insert(x.movie);
    for (const auto& x : extras) movie_ids.insert(x.movie);

    std::unordered_map<std::int64_t, std::size_t> user_local, movie_local;
    std::size_t idx = 0;
    for (auto id : user_ids) user_local[id] = idx++;
    idx = 0;
    for (auto id : movie_ids) movie_local[id] = idx++;

    std::set<std::string> year_vals, genre_vals, tag_vals;
    for (const auto& m : movies) {
        if (!m.year.empty()) year_vals.insert(m.year);
        for (const auto& g : m.genres) genre_vals.insert(g);
    }
    for (const auto& t : tags) tag_vals.insert(t.tag);
    std::map<std::string, std::set<std::string>> extra_vals;  // kind -> values
    for (const auto& e : extras) extra_vals[e.kind].insert(e.value);

    Hin hin;
    auto push_type = [&](const std::string& name, NodeRole role, std::size_t count) {
        const std::size_t begin = hin.types.empty() ? 0 : hin.types.back().end;
        hin.types.push_back({name, role, begin, begin + count});
        return hin.types.size() - 1;
    };
    push_type("user", NodeRole::User, user_ids.size());
    push_type("movie", NodeRole::Item, movie_ids.size());
    const std::size_t year_t = push_type("year", NodeRole::Feature, year_vals.size());
    const std::size_t genre_t = push_type("genre", NodeRole::Feature, genre_vals.size());
    const std::size_t tag_t = push_type("tag", NodeRole::Feature, tag_vals.size());
    std::map<std::string, std::size_t> extra_types;
    for (const auto& [kind, vals] : extra_vals)
        extra_types[kind] = push_type(kind, NodeRole::Feature, vals.size());

    auto local_index = [](const std::set<std::string>& vals) {
        std::unordered_map<std::string, std::size_t> idx_map;
        std::size_t i = 0;
        for (const auto& v : vals) idx_map[v] = i++;
        return idx_map;
    };
    const auto year_local = local_index(year_vals);
    const auto genre_local = local_index(genre_vals);
    const auto tag_local = local_index(tag_vals);
    std::map<std::string, std::unordered_map<std::string, std::size_t>> extra_local;
    for (const auto& [kind, vals] : extra_vals) extra_local[kind] = local_index(vals);

    hin.node_labels.resize(hin.n_nodes());
    for (auto id : user_ids) hin.node_labels[hin.types[0].begin + user_local[id]] = std::to_string(id);
    for (auto id : movie_ids) hin.node_labels[hin.types[1].begin + movie_local[id]] = std::to_string(id);
    auto label_features = [&](std::size_t type_idx, const std::set<std::string>& vals) {
        std::size_t i = hin.types[type_idx].begin;
        for (const auto& v : vals) hin.node_labels[i++] = v;
    };
    label_features(year_t, year_vals);
    label_features(genre_t, genre_vals);
    label_features(tag_t, tag_vals);
    for (const auto& [kind, vals] : extra_vals) label_features(extra_types[kind], vals);

    // ---- interactions (deduped, latest timestamp wins) -------------------
    std::map<std::pair<std::size_t, std::size_t>, std::int64_t> inter;
    for (const auto& x : ratings) {
        const auto key = std::make_pair(user_local[x.user], movie_local[x.movie]);
        auto [it, fresh] = inter.emplace(key, x.ts);
        if (!fresh) it->second = std::max(it->second, x.ts);
    }
    hin.interactions.reserve(inter.size());
    for (const auto& [key, ts] : inter)
        hin.interactions.push_back(
            {hin.types[0].begin + key.first, hin.types[1].begin + key.second, ts});

    // ---- relations --------------------------------------------------------
    auto add_relation = [&](const std::string& name, std::size_t src, std::size_t dst,
                            std::vector<Coo<float>> edges) {
        Relation r;
        r.name = name;
        r.src_type = src;
        r.dst_type = dst;
        r.csr = csr_from_edges(hin.types[src].count(), hin.types[dst].count(), std::move(edges));
        hin.relations.push_back(std::move(r));
    };

    {
        std::vector<Coo<float>> e;
        e.reserve(hin.interactions.size());
        for (const auto& it : hin.interactions)
            e.push_back({it.user - hin.types[0].begin, it.item - hin.types[1].begin, 1.0f});
        add_relation("rated", 0, 1, std::move(e));
    }
    {
        std::vector<Coo<float>> ye, ge;
        for (const auto& m : movies) {
            const std::size_t ml = movie_local[m.movie];
            if (!m.year.empty()) ye.push_back({ml, year_local.at(m.year), 1.0f});
            for (const auto& g : m.genres) ge.push_back({ml, genre_local.at(g), 1.0f});
        }
        add_relation("has_year", 1, year_t, std::move(ye));
        add_relation("has_genre", 1, genre_t, std::move(ge));
    }
    {
        std::vector<Coo<float>> ut, mt;
        for (const auto& t : tags) {
            ut.push_back({user_local[t.user], tag_local.at(t.tag), 1.0f});
            mt.push_back({movie_local[t.movie], tag_local.at(t.tag), 1.0f});
        }
        add_relation("user_tag", 0, tag_t, std::move(ut));
        add_relation("item_tag", 1, tag_t, std::move(mt));
    }
    for (const auto& [kind, type_idx] : extra_types) {
        std::vector<Coo<float>> e;
        for (const auto& x : extras)
            if (x.kind == kind)
                e.push_back({movie_local[x.movie], extra_local[kind].at(x.value), 1.0f});
        add_relation(relation_name_for_kind(kind), 1, type_idx, std::move(e));
    }

    hin.validate();
    return hin;
}

HinStats hin_stats(const Hin& hin) {
    return {hin.n_nodes(), hin.n_users(), hin.n_items(), hin.interactions.size()};
}

}  // namespace peagnn
