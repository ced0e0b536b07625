#pragma once

// Instance files (JSON) and oracle transcripts (JSON Lines).

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "powerprobe/oracle.hpp"

namespace powerprobe::io {

using json = nlohmann::ordered_json;

namespace detail {

inline json coeffs_to_json(const Polynomial& f, u64 d) {
    json arr = json::array();
    for (u64 i = 0; i <= d; ++i) arr.push_back(std::to_string(f.coeff(i)));
    return arr;
}

inline u64 parse_decimal(const std::string& s) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos, 10);
    } catch (const std::exception&) {
        throw std::invalid_argument("coefficient is not a decimal integer: \"" + s + "\"");
    }
    if (pos != s.size() || s.empty() || s.front() == '-' || s.front() == '+')
        throw std::invalid_argument("coefficient is not a decimal integer: \"" + s + "\"");
    return v;
}

inline Polynomial coeffs_from_json(const json& arr, u64 p) {
    if (!arr.is_array()) throw std::invalid_argument("coefficient list must be an array");
    std::vector<u64> c;
    for (const auto& item : arr) {
        if (!item.is_string()) throw std::invalid_argument("coefficients must be decimal strings");
        u64 v = parse_decimal(item.get<std::string>());
        if (v >= p) throw std::invalid_argument("coefficient " + std::to_string(v) + " not reduced mod p");
        c.push_back(v);
    }
    return Polynomial(p, std::move(c));
}

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    return j.at(key).get<T>();
}

}  // namespace detail

inline json instance_to_json(const Instance& inst) {
    json j;
    j["p"] = inst.p;
    j["e"] = inst.e;
    j["d"] = inst.d;
    if (inst.f) j["f"] = detail::coeffs_to_json(*inst.f, inst.d);
    if (inst.g) j["g"] = detail::coeffs_to_json(*inst.g, inst.d);
    j["seed"] = inst.seed;
    return j;
}

inline std::string write_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

inline Instance instance_from_json(const json& j) {
    Instance inst;
    inst.p = detail::require<u64>(j, "p");
    inst.e = detail::require<u64>(j, "e");
    inst.d = detail::require<u64>(j, "d");
    inst.seed = j.value("seed", u64{0});
    if (j.contains("f") && !j.at("f").is_null()) inst.f = detail::coeffs_from_json(j.at("f"), inst.p);
    if (j.contains("g") && !j.at("g").is_null()) inst.g = detail::coeffs_from_json(j.at("g"), inst.p);
    inst.validate();
    return inst;
}

inline Instance read_instance(const std::string& text) { return instance_from_json(json::parse(text)); }

/// Header line {p, e, query_count}, then one {x, answer} per query.
inline std::string write_transcript(const Transcript& t) {
    std::ostringstream os;
    json header;
    header["p"] = t.modulus();
    header["e"] = t.exponent();
    header["query_count"] = t.query_count();
    os << header.dump() << '\n';
    for (const auto& entry : t.entries()) {
        json line;
        line["x"] = entry.x;
        line["answer"] = entry.answer;
        os << line.dump() << '\n';
    }
    return os.str();
}

inline Transcript read_transcript(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("transcript is empty");
    const json header = json::parse(line);
    Transcript t(detail::require<u64>(header, "p"), detail::require<u64>(header, "e"));
    const auto expected = detail::require<std::size_t>(header, "query_count");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json entry = json::parse(line);
        const auto x = detail::require<u64>(entry, "x");
        const auto answer = detail::require<u64>(entry, "answer");
        if (x >= t.modulus() || answer >= t.modulus()) throw std::invalid_argument("transcript value not reduced mod p");
        t.record(x, answer);
    }
    if (t.query_count() != expected)
        throw std::invalid_argument("transcript header says " + std::to_string(expected) + " queries, found " +
                                    std::to_string(t.query_count()));
    return t;
}

inline Transcript read_transcript(const std::string& text) {
    std::istringstream in(text);
    return read_transcript(in);
}

}  // namespace powerprobe::io
