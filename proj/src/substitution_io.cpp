#include "sadic/substitution_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sadic/error.hpp"

namespace sadic {

using nlohmann::json;

namespace {

int letter_from_json(const json& v, const BlockSubstitution& sub) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        for (std::size_t i = 0; i < sub.letter_names.size(); ++i)
            if (sub.letter_names[i] == s) return static_cast<int>(i + 1);
        return 0;
    }
    throw Error("rule entries must be letter names or integers");
}

void flatten_rule(const json& node, std::size_t axis, const BlockSubstitution& sub, std::vector<int>& out) {
    if (axis == sub.dim) {
        out.push_back(letter_from_json(node, sub));
        return;
    }
    if (!node.is_array()) throw Error("rule nesting depth does not match dim");
    if (node.size() != static_cast<std::size_t>(sub.expansion[axis]))
        throw Error("rule has " + std::to_string(node.size()) + " entries on axis " + std::to_string(axis) +
                    ", expected " + std::to_string(sub.expansion[axis]));
    for (const auto& child : node) flatten_rule(child, axis + 1, sub, out);
}

json nest_rule(const std::vector<int>& block, const BlockSubstitution& sub, std::size_t axis, std::size_t& pos) {
    if (axis == sub.dim) {
        const int l = block[pos++];
        if (l >= 1 && static_cast<std::size_t>(l) <= sub.letter_names.size()) return sub.letter_names[l - 1];
        return l;
    }
    json arr = json::array();
    for (std::int64_t i = 0; i < sub.expansion[axis]; ++i) arr.push_back(nest_rule(block, sub, axis + 1, pos));
    return arr;
}

}  // namespace

BlockSubstitution substitution_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("substitution file is not valid JSON: ") + e.what());
    }
    try {
        BlockSubstitution sub;
        sub.name = doc.value("name", std::string{});
        sub.dim = doc.at("dim").get<std::size_t>();
        for (const auto& a : doc.at("alphabet")) sub.letter_names.push_back(a.get<std::string>());
        sub.alphabet_size = sub.letter_names.size();
        sub.expansion = doc.at("expansion").get<std::vector<std::int64_t>>();
        if (sub.expansion.size() != sub.dim) throw Error("expansion length does not match dim");
        for (auto e : sub.expansion)
            if (e < 1) throw Error("expansion entries must be positive");

        const auto& rules = doc.at("rules");
        sub.blocks.assign(sub.alphabet_size, {});
        std::vector<bool> seen(sub.alphabet_size, false);
        for (const auto& [key, value] : rules.items()) {
            int j = letter_from_json(json(key), sub);
            if (j == 0) {
                try {
                    j = std::stoi(key);
                } catch (const std::exception&) {
                    throw Error("rule key '" + key + "' is not a letter of the alphabet");
                }
            }
            if (j < 1 || static_cast<std::size_t>(j) > sub.alphabet_size)
                throw Error("rule key '" + key + "' is not a letter of the alphabet");
            std::vector<int> flat;
            flatten_rule(value, 0, sub, flat);
            sub.blocks[static_cast<std::size_t>(j - 1)] = std::move(flat);
            seen[static_cast<std::size_t>(j - 1)] = true;
        }
        for (std::size_t j = 0; j < sub.alphabet_size; ++j)
            if (!seen[j]) throw Error("no rule for letter '" + sub.letter_names[j] + "'");
        return sub;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed substitution file: ") + e.what());
    }
}

BlockSubstitution load_substitution(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open substitution file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto sub = substitution_from_json(ss.str());
    if (sub.name.empty()) sub.name = path.stem().string();
    return sub;
}

std::string substitution_to_json(const BlockSubstitution& sub) {
    json doc;
    doc["name"] = sub.name;
    doc["dim"] = sub.dim;
    doc["alphabet"] = sub.letter_names;
    doc["expansion"] = sub.expansion;
    json rules = json::object();
    for (std::size_t j = 0; j < sub.blocks.size(); ++j) {
        std::size_t pos = 0;
        const std::string key = j < sub.letter_names.size() ? sub.letter_names[j] : std::to_string(j + 1);
        rules[key] = nest_rule(sub.blocks[j], sub, 0, pos);
    }
    doc["rules"] = rules;
    return doc.dump(2);
}

}  // namespace sadic
