#pragma once

// Election files.
//
// Text form, one record per line, '#' starts a comment:
//
//   election m=<int> k=<int>
//   harmonious order=<i0,i1,...>        (optional, election-wide; must precede the first district)
//   district n=<int> counts=<c0,c1,...>
//   harmonious order=<i0,i1,...>        (optional, applies to the district above)
//   ranking mult=<int> order=<i0,...>   (zero or more, belong to the district above)
//
// JSON form: {"num_candidates", "harmonious_order"?, "districts": [{"population",
// "top_counts", "rankings"?: [{"mult", "order"}], "harmonious_order"?}]}.

#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"

namespace ballot {

enum class ElectionFormat { Text, Json };

inline ElectionFormat format_for_path(std::string_view path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return ElectionFormat::Json;
    return ElectionFormat::Text;
}

namespace detail {

inline std::string join_indices(const std::vector<Candidate>& cs) {
    std::string out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(cs[i].index);
    }
    return out;
}

inline std::string join_counts(const std::vector<std::uint64_t>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

inline std::uint64_t parse_uint(std::string_view s, std::size_t line, std::string_view field) {
    if (s.empty()) throw ParseError(line, "empty value for '" + std::string(field) + "'");
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            throw ParseError(line, "non-numeric value '" + std::string(s) + "' for '" + std::string(field) + "'");
        if (v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10)
            throw ParseError(line, "value overflows for '" + std::string(field) + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

inline std::vector<std::uint64_t> parse_uint_list(std::string_view s, std::size_t line, std::string_view field) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(parse_uint(s.substr(start, comma - start), line, field));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::vector<Candidate> parse_candidates(std::string_view s, std::size_t line, std::string_view field) {
    std::vector<Candidate> out;
    for (auto v : parse_uint_list(s, line, field)) out.emplace_back(v);
    return out;
}

struct Record {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> fields;

    std::string_view get(std::string_view key, std::size_t line) const {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw ParseError(line, "'" + kind + "' record is missing field '" + std::string(key) + "'");
    }
};

inline Record parse_record(const std::string& text, std::size_t line) {
    std::istringstream in(text);
    Record r;
    in >> r.kind;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError(line, "expected key=value, got '" + tok + "'");
        r.fields.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return r;
}

}  // namespace detail

inline void write_election_text(const Election& e, std::ostream& out) {
    out << "election m=" << e.num_candidates << " k=" << e.k() << '\n';
    if (e.order) out << "harmonious order=" << detail::join_indices(e.order->order) << '\n';
    for (const auto& d : e.districts) {
        out << "district n=" << d.population << " counts=" << detail::join_counts(d.top_counts) << '\n';
        if (d.order) out << "harmonious order=" << detail::join_indices(d.order->order) << '\n';
        if (d.rankings)
            for (const auto& b : *d.rankings)
                out << "ranking mult=" << b.multiplicity << " order=" << detail::join_indices(b.ranking.order) << '\n';
    }
}

/// Parses the text form and validates the result.
inline Election read_election_text(std::istream& in) {
    Election e;
    std::size_t declared_k = 0;
    bool have_header = false;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto rec = detail::parse_record(raw, line);

        if (!have_header) {
            if (rec.kind != "election") throw ParseError(line, "expected 'election' header, got '" + rec.kind + "'");
            e.num_candidates = detail::parse_uint(rec.get("m", line), line, "m");
            declared_k = detail::parse_uint(rec.get("k", line), line, "k");
            have_header = true;
            continue;
        }

        if (rec.kind == "district") {
            if (e.districts.size() == declared_k)
                throw ParseError(line, "more districts than declared k=" + std::to_string(declared_k));
            DistrictProfile d;
            d.population = detail::parse_uint(rec.get("n", line), line, "n");
            d.top_counts = detail::parse_uint_list(rec.get("counts", line), line, "counts");
            if (d.top_counts.size() != e.num_candidates)
                throw ParseError(line, "counts has " + std::to_string(d.top_counts.size()) + " entries, expected m=" +
                                           std::to_string(e.num_candidates));
            e.districts.push_back(std::move(d));
        } else if (rec.kind == "harmonious") {
            HarmoniousOrder h{detail::parse_candidates(rec.get("order", line), line, "order")};
            if (e.districts.empty()) {
                if (e.order) throw ParseError(line, "duplicate election-wide harmonious order");
                e.order = std::move(h);
            } else {
                auto& d = e.districts.back();
                if (d.order || d.rankings) throw ParseError(line, "harmonious order must directly follow its district");
                d.order = std::move(h);
            }
        } else if (rec.kind == "ranking") {
            if (e.districts.empty()) throw ParseError(line, "ranking before any district");
            RankingBlock b;
            b.multiplicity = detail::parse_uint(rec.get("mult", line), line, "mult");
            b.ranking.order = detail::parse_candidates(rec.get("order", line), line, "order");
            auto& d = e.districts.back();
            if (!d.rankings) d.rankings.emplace();
            d.rankings->push_back(std::move(b));
        } else {
            throw ParseError(line, "unknown record '" + rec.kind + "'");
        }
    }
    if (!have_header) throw ParseError(line, "missing 'election' header");
    if (e.districts.size() != declared_k)
        throw ParseError(line, "truncated: declared k=" + std::to_string(declared_k) + " but found " +
                                   std::to_string(e.districts.size()) + " districts");
    for (const auto& d : e.districts) e.total_population += d.population;
    validate(e);
    return e;
}

inline nlohmann::json election_to_json(const Election& e) {
    using nlohmann::json;
    auto indices = [](const std::vector<Candidate>& cs) {
        json a = json::array();
        for (auto c : cs) a.push_back(c.index);
        return a;
    };
    json j;
    j["num_candidates"] = e.num_candidates;
    if (e.order) j["harmonious_order"] = indices(e.order->order);
    j["districts"] = json::array();
    for (const auto& d : e.districts) {
        json dj;
        dj["population"] = d.population;
        dj["top_counts"] = d.top_counts;
        if (d.order) dj["harmonious_order"] = indices(d.order->order);
        if (d.rankings) {
            dj["rankings"] = json::array();
            for (const auto& b : *d.rankings)
                dj["rankings"].push_back({{"mult", b.multiplicity}, {"order", indices(b.ranking.order)}});
        }
        j["districts"].push_back(std::move(dj));
    }
    return j;
}

inline Election election_from_json(const nlohmann::json& j) {
    auto candidates = [](const nlohmann::json& a) {
        std::vector<Candidate> out;
        for (const auto& v : a) out.emplace_back(v.get<std::uint32_t>());
        return out;
    };
    Election e;
    try {
        e.num_candidates = j.at("num_candidates").get<std::size_t>();
        if (j.contains("harmonious_order")) e.order = HarmoniousOrder{candidates(j["harmonious_order"])};
        for (const auto& dj : j.at("districts")) {
            DistrictProfile d;
            d.population = dj.at("population").get<std::uint64_t>();
            d.top_counts = dj.at("top_counts").get<std::vector<std::uint64_t>>();
            if (dj.contains("harmonious_order")) d.order = HarmoniousOrder{candidates(dj["harmonious_order"])};
            if (dj.contains("rankings")) {
                d.rankings.emplace();
                for (const auto& bj : dj["rankings"])
                    d.rankings->push_back({Ranking{candidates(bj.at("order"))}, bj.at("mult").get<std::uint64_t>()});
            }
            e.districts.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("json: ") + ex.what());
    }
    for (const auto& d : e.districts) e.total_population += d.population;
    validate(e);
    return e;
}

inline void write_election(const Election& e, std::ostream& out, ElectionFormat fmt) {
    if (fmt == ElectionFormat::Json)
        out << election_to_json(e).dump(2) << '\n';
    else
        write_election_text(e, out);
}

inline Election read_election(std::istream& in, ElectionFormat fmt) {
    if (fmt == ElectionFormat::Text) return read_election_text(in);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("json: ") + ex.what());
    }
    return election_from_json(j);
}

inline Election read_election(const std::string& path, ElectionFormat fmt) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_election(in, fmt);
}

inline Election read_election(const std::string& path) { return read_election(path, format_for_path(path)); }

inline void write_election(const Election& e, const std::string& path, ElectionFormat fmt) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_election(e, out, fmt);
}

inline std::string to_text(const Election& e) {
    std::ostringstream os;
    write_election_text(e, os);
    return os.str();
}

}  // namespace ballot
