#pragma once

// JSON persistence for world models:
// { "domain": [...], "constants": {...}, "predicates": { "sleep": [["j"]] } }

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlc/error.hpp"
#include "nlc/logic.hpp"

namespace nlc::world {

inline logic::WorldModel from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("world model is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) throw Error("world model must be a JSON object");

    logic::WorldModel w;
    for (const auto& e : doc.value("domain", nlohmann::json::array())) {
        if (!e.is_string()) throw Error("domain entries must be strings");
        w.domain.insert(e.get<std::string>());
    }
    const nlohmann::json constants = doc.value("constants", nlohmann::json::object());
    for (const auto& [name, val] : constants.items()) {
        if (!val.is_string()) throw Error("constant interpretations must be strings");
        const std::string entity = val.get<std::string>();
        if (w.domain.count(entity) == 0)
            throw Error("constant '" + name + "' maps to '" + entity + "' outside the domain");
        w.constants[name] = entity;
    }
    const nlohmann::json predicates = doc.value("predicates", nlohmann::json::object());
    for (const auto& [name, rows] : predicates.items()) {
        if (!rows.is_array()) throw Error("predicate '" + name + "' must map to tuple lists");
        std::size_t arity = 0;
        bool first = true;
        for (const auto& row : rows) {
            if (!row.is_array()) throw Error("predicate '" + name + "' tuples must be arrays");
            std::vector<std::string> tuple;
            for (const auto& cell : row) {
                if (!cell.is_string())
                    throw Error("predicate '" + name + "' tuple entries must be strings");
                const std::string entity = cell.get<std::string>();
                if (w.domain.count(entity) == 0)
                    throw Error("predicate '" + name + "' references '" + entity +
                                "' outside the domain");
                tuple.push_back(entity);
            }
            if (first) {
                arity = tuple.size();
                first = false;
            } else if (tuple.size() != arity) {
                throw Error("predicate '" + name + "' has tuples of mixed arity");
            }
            w.predicates[name].insert(std::move(tuple));
        }
        w.predicates[name];  // empty extension is representable
    }
    return w;
}

inline std::string to_json_text(const logic::WorldModel& w) {
    nlohmann::ordered_json doc;
    doc["domain"] = nlohmann::ordered_json::array();
    for (const auto& e : w.domain) doc["domain"].push_back(e);
    doc["constants"] = nlohmann::ordered_json::object();
    for (const auto& [name, entity] : w.constants) doc["constants"][name] = entity;
    doc["predicates"] = nlohmann::ordered_json::object();
    for (const auto& [name, tuples] : w.predicates) {
        auto rows = nlohmann::ordered_json::array();
        for (const auto& t : tuples) rows.push_back(t);
        doc["predicates"][name] = std::move(rows);
    }
    return doc.dump(2) + "\n";
}

inline logic::WorldModel load_world(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open world model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

inline void save_world(const logic::WorldModel& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write world model file: " + path);
    out << to_json_text(w);
}

}  // namespace nlc::world
