#include "divlab/problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace divlab {

namespace {

using nlohmann::json;

Rational rational_from_json(const json& v) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw ValidationError("rational values must be integers or \"p/q\" strings");
}

LocalRule rule_from_json(const json& v, const Shape& shape) {
    LocalRule rule;
    if (!v.contains("p")) throw ValidationError("restriction rule missing prime p");
    rule.p = v.at("p").get<std::int64_t>();
    const std::string kind = v.value("rule", std::string("all"));
    if (kind == "all") {
        rule.kind = RuleKind::All;
    } else if (kind == "coprime") {
        rule.kind = RuleKind::ZeroCoords;
        rule.zero_coords.resize(shape.total());
        for (int t = 0; t < shape.total(); ++t) rule.zero_coords[t] = t;
    } else if (kind == "zero") {
        rule.kind = RuleKind::ZeroCoords;
        if (!v.contains("coords")) throw ValidationError("zero rule missing coords");
        for (const json& c : v.at("coords")) {
            if (!c.is_array() || c.size() != 2)
                throw ValidationError("zero rule coords must be [i, j] pairs");
            int i = c.at(0).get<int>(), j = c.at(1).get<int>();
            if (i < 1 || i > shape.parts() || j < 1 || j > shape.part_size(i - 1))
                throw ValidationError("zero rule coordinate out of range");
            rule.zero_coords.push_back(shape.flat(i - 1, j - 1));
        }
    } else if (kind == "exclude") {
        rule.kind = RuleKind::FiniteComplement;
        if (!v.contains("patterns")) throw ValidationError("exclude rule missing patterns");
        for (const json& pat : v.at("patterns")) {
            ExponentVector f;
            for (const json& x : pat) f.r.push_back(x.get<std::int64_t>());
            rule.excluded.push_back(std::move(f));
        }
    } else {
        throw ValidationError("unknown restriction rule kind: " + kind);
    }
    return rule;
}

}  // namespace

ProblemSpec parse_problem(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("problem JSON parse failure: ") + e.what());
    }
    if (!root.contains("parts") || !root.at("parts").is_array() || root.at("parts").empty())
        throw ValidationError("problem needs a non-empty \"parts\" array");

    ProblemSpec prob;
    std::vector<int> sizes;
    for (const json& part : root.at("parts")) {
        if (!part.contains("gamma") || !part.contains("b"))
            throw ValidationError("each part needs \"gamma\" and \"b\" arrays");
        if (part.at("gamma").size() != part.at("b").size())
            throw ValidationError("gamma and b must have equal arity within a part");
        sizes.push_back(static_cast<int>(part.at("gamma").size()));
    }
    Shape shape(sizes);
    prob.system.shape = shape;
    prob.box.shape = shape;
    for (const json& part : root.at("parts")) {
        for (const json& g : part.at("gamma"))
            prob.system.gamma.push_back(g.get<std::int64_t>());
        for (const json& q : part.at("b"))
            prob.box.b.push_back(rational_from_json(q));
    }

    if (root.contains("restriction"))
        for (const json& r : root.at("restriction"))
            prob.restriction.rules.push_back(rule_from_json(r, shape));

    if (root.contains("a")) {
        WeightTuple w;
        w.shape = shape;
        const json& aj = root.at("a");
        if (!aj.is_array() || static_cast<int>(aj.size()) != shape.parts())
            throw ValidationError("weights \"a\" must list one array per part");
        for (int i = 0; i < shape.parts(); ++i) {
            if (static_cast<int>(aj.at(i).size()) != shape.part_size(i))
                throw ValidationError("weight arity mismatch in part " + std::to_string(i + 1));
            for (const json& q : aj.at(i)) w.a.push_back(rational_from_json(q));
        }
        prob.weights = std::move(w);
    }

    prob.balanced = root.value("balanced", false);
    prob.validate();
    return prob;
}

std::string problem_to_json(const ProblemSpec& prob) {
    json root;
    json parts = json::array();
    const Shape& shape = prob.system.shape;
    for (int i = 0; i < shape.parts(); ++i) {
        json part;
        json gamma = json::array(), b = json::array();
        for (int j = 0; j < shape.part_size(i); ++j) {
            gamma.push_back(prob.system.at(i, j));
            b.push_back(to_string(prob.box.at(i, j)));
        }
        part["gamma"] = gamma;
        part["b"] = b;
        parts.push_back(part);
    }
    root["parts"] = parts;
    root["balanced"] = prob.balanced;

    if (!prob.restriction.rules.empty()) {
        json rules = json::array();
        for (const LocalRule& rule : prob.restriction.rules) {
            json r;
            r["p"] = rule.p;
            switch (rule.kind) {
                case RuleKind::All:
                    r["rule"] = "all";
                    break;
                case RuleKind::ZeroCoords: {
                    if (static_cast<int>(rule.zero_coords.size()) == shape.total()) {
                        r["rule"] = "coprime";
                    } else {
                        r["rule"] = "zero";
                        json coords = json::array();
                        for (int t : rule.zero_coords) {
                            int i = shape.part_of(t);
                            coords.push_back({i + 1, t - shape.offset(i) + 1});
                        }
                        r["coords"] = coords;
                    }
                    break;
                }
                case RuleKind::FiniteComplement: {
                    r["rule"] = "exclude";
                    json pats = json::array();
                    for (const ExponentVector& f : rule.excluded) pats.push_back(f.r);
                    r["patterns"] = pats;
                    break;
                }
            }
            rules.push_back(r);
        }
        root["restriction"] = rules;
    }

    if (prob.weights) {
        json aj = json::array();
        for (int i = 0; i < shape.parts(); ++i) {
            json row = json::array();
            for (int j = 0; j < shape.part_size(i); ++j)
                row.push_back(to_string(prob.weights->at(i, j)));
            aj.push_back(row);
        }
        root["a"] = aj;
    }
    // nlohmann::json objects are key-sorted, so dump() is canonical.
    return root.dump();
}

std::uint64_t fingerprint(const std::string& canonical_text) {
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a offset basis
    for (unsigned char c : canonical_text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t problem_fingerprint(const ProblemSpec& prob) {
    return fingerprint(problem_to_json(prob));
}

std::string problem_fingerprint_hex(const ProblemSpec& prob) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(problem_fingerprint(prob)));
    return std::string(buf);
}

ProblemSpec load_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["fingerprint"] = m.fingerprint;
    j["command"] = m.command;
    json params = json::object();
    for (const auto& [k, v] : m.parameters) params[k] = v;
    j["parameters"] = params;
    j["version"] = m.version;
    j["precision_bits"] = m.precision_bits;
    j["wall_seconds"] = m.wall_seconds;
    j["result_summary"] = m.result_summary;
    return j.dump();
}

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw ValidationError("empty entry in list: " + text);
        out.push_back(parse_rational(item));
    }
    if (out.empty()) throw ValidationError("expected a comma-separated list");
    return out;
}

std::vector<Integer> parse_integer_list(const std::string& text) {
    std::vector<Integer> out;
    for (const Rational& q : parse_rational_list(text)) {
        if (denominator(q) != 1)
            throw ValidationError("expected integers in list: " + text);
        out.push_back(numerator(q));
    }
    return out;
}

}  // namespace divlab
