#include "riskdp/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "riskdp/allocation.hpp"
#include "riskdp/errors.hpp"

namespace riskdp {

namespace {

using nlohmann::json;

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ParseError(std::string("unknown key '") + key + "' in " + where);
    }
}

std::vector<std::string> parse_id_array(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ParseError(std::string(what) + " must be a nonempty array of strings");
    std::vector<std::string> ids;
    for (const auto& v : j) {
        if (!v.is_string())
            throw ParseError(std::string(what) + " must contain only strings");
        ids.push_back(v.get<std::string>());
    }
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ParseError(std::string("duplicate id in ") + what);
    return sorted; // lexicographic index order
}

double require_number(const json& j, const char* what) {
    if (!j.is_number())
        throw ParseError(std::string(what) + " must be a number");
    return j.get<double>();
}

int lookup(const Mdp& m, const json& j, const char* field, bool state) {
    if (!j.is_string())
        throw ParseError(std::string(field) + " must be an id string");
    auto id = j.get<std::string>();
    int idx = state ? m.state_index(id) : m.action_index(id);
    if (idx < 0)
        throw ParseError(std::string("unknown ") + (state ? "state" : "action") +
                         " id '" + id + "'");
    return idx;
}

} // namespace

Mdp parse_mdp_json(const std::string& text) {
    json doc = parse_text(text);
    if (!doc.is_object()) throw ParseError("MDP document must be an object");
    reject_unknown_keys(doc, {"states", "actions", "horizon", "available",
                              "transitions", "rewards", "initial"},
                        "the MDP document");
    if (!doc.contains("states") || !doc.contains("actions") ||
        !doc.contains("transitions") || !doc.contains("initial"))
        throw ParseError("states, actions, transitions, and initial are required");

    auto states = parse_id_array(doc["states"], "states");
    auto actions = parse_id_array(doc["actions"], "actions");
    int horizon = 1;
    if (doc.contains("horizon")) {
        if (!doc["horizon"].is_number_integer())
            throw ParseError("horizon must be an integer");
        horizon = doc["horizon"].get<int>();
        if (horizon < 1) throw ParseError("horizon must be at least 1");
    }
    Mdp m(states, actions, horizon);

    if (doc.contains("available")) {
        const auto& av = doc["available"];
        if (!av.is_object()) throw ParseError("available must be an object");
        for (const auto& [sid, list] : av.items()) {
            int s = m.state_index(sid);
            if (s < 0) throw ParseError("unknown state id '" + sid + "' in available");
            if (!list.is_array() || list.empty())
                throw ParseError("available[" + sid + "] must be a nonempty array");
            std::vector<int> acts;
            for (const auto& aid : list) acts.push_back(lookup(m, aid, "available entry", false));
            std::sort(acts.begin(), acts.end());
            if (std::adjacent_find(acts.begin(), acts.end()) != acts.end())
                throw ParseError("duplicate action in available[" + sid + "]");
            m.set_available(s, std::move(acts));
        }
    }

    const auto& trans = doc["transitions"];
    if (!trans.is_array() || trans.empty())
        throw ParseError("transitions must be a nonempty array");
    std::set<std::tuple<int, int, int>> seen;
    for (const auto& row : trans) {
        if (!row.is_object()) throw ParseError("each transition must be an object");
        reject_unknown_keys(row, {"s", "a", "sp", "p"}, "a transition");
        if (!row.contains("s") || !row.contains("a") || !row.contains("sp") ||
            !row.contains("p"))
            throw ParseError("a transition needs keys s, a, sp, p");
        int s = lookup(m, row["s"], "s", true);
        int a = lookup(m, row["a"], "a", false);
        int sp = lookup(m, row["sp"], "sp", true);
        if (!seen.insert({s, a, sp}).second)
            throw ParseError("duplicate transition entry");
        m.set_transition(s, a, sp, require_number(row["p"], "p"));
    }

    if (doc.contains("rewards")) {
        const auto& rew = doc["rewards"];
        if (!rew.is_array()) throw ParseError("rewards must be an array");
        std::set<std::tuple<int, int, int>> seen_r;
        for (const auto& row : rew) {
            if (!row.is_object()) throw ParseError("each reward must be an object");
            reject_unknown_keys(row, {"s", "a", "sp", "r"}, "a reward");
            if (!row.contains("s") || !row.contains("a") || !row.contains("sp") ||
                !row.contains("r"))
                throw ParseError("a reward needs keys s, a, sp, r");
            int s = lookup(m, row["s"], "s", true);
            int a = lookup(m, row["a"], "a", false);
            int sp = lookup(m, row["sp"], "sp", true);
            if (!seen.count({s, a, sp}))
                throw ParseError("reward on a missing transition");
            if (!seen_r.insert({s, a, sp}).second)
                throw ParseError("duplicate reward entry");
            m.set_reward(s, a, sp, require_number(row["r"], "r"));
        }
    }

    const auto& init = doc["initial"];
    if (!init.is_object()) throw ParseError("initial must be an object");
    std::vector<double> weights(static_cast<std::size_t>(m.num_states()), 0.0);
    for (const auto& [sid, w] : init.items()) {
        int s = m.state_index(sid);
        if (s < 0) throw ParseError("unknown state id '" + sid + "' in initial");
        weights[static_cast<std::size_t>(s)] = require_number(w, "initial weight");
    }
    m.set_initial(std::move(weights));
    return m;
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

Mdp load_mdp_file(const std::string& path) { return parse_mdp_json(slurp(path)); }

DeterministicPolicy parse_policy_json(const Mdp& m, const std::string& text) {
    json doc = parse_text(text);
    if (!doc.is_object()) throw ParseError("policy document must be an object");
    DeterministicPolicy pi;
    pi.action.assign(static_cast<std::size_t>(m.num_states()), -1);
    for (const auto& [sid, aid] : doc.items()) {
        int s = m.state_index(sid);
        if (s < 0) throw ParseError("unknown state id '" + sid + "' in policy");
        int a = lookup(m, aid, "policy action", false);
        const auto& avail = m.available(s);
        if (std::find(avail.begin(), avail.end(), a) == avail.end())
            throw ParseError("action '" + aid.get<std::string>() +
                             "' not available in state '" + sid + "'");
        pi.action[static_cast<std::size_t>(s)] = a;
    }
    for (int s = 0; s < m.num_states(); ++s)
        if (pi.action[static_cast<std::size_t>(s)] < 0)
            throw ParseError("policy missing state '" + m.state_ids()[s] + "'");
    return pi;
}

DeterministicPolicy load_policy_file(const Mdp& m, const std::string& path) {
    return parse_policy_json(m, slurp(path));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string json_number(double v) {
    if (!std::isfinite(v)) return "\"" + format_double(v) + "\"";
    return format_double(v);
}

namespace {

std::string json_array(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += json_number(xs[i]);
    }
    return out + "]";
}

std::string json_array(const std::vector<int>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(xs[i]);
    }
    return out + "]";
}

} // namespace

std::string report_to_json(const DecompositionReport& rep) {
    std::string out = "{\n";
    out += "  \"scheme\": \"" + rep.scheme + "\",\n";
    out += "  \"alpha\": " + json_number(rep.alpha) + ",\n";
    out += "  \"value\": " + json_number(rep.value) + ",\n";
    out += "  \"allocation_mode\": \"" +
           std::string(allocation_mode_name(rep.allocation.mode)) + "\",\n";
    out += "  \"allocation\": " + json_array(rep.allocation.weights) + ",\n";
    out += "  \"inner_levels\": " + json_array(rep.inner_levels) + ",\n";
    out += "  \"inner_values\": " + json_array(rep.inner_values) + ",\n";
    out += "  \"inner_actions\": " + json_array(rep.inner_actions) + ",\n";
    out += "  \"oracle_value\": " + json_number(rep.oracle_value) + ",\n";
    out += "  \"oracle_gap\": " + json_number(rep.oracle_gap) + "\n";
    return out + "}\n";
}

std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = "alpha,decomposition,oracle,oracle_action,greedy_action,realized\n";
    for (const auto& row : sweep.rows) {
        out += csv_double(row.alpha) + "," + csv_double(row.decomposition) + "," +
               csv_double(row.oracle) + "," + std::to_string(row.oracle_action) + "," +
               std::to_string(row.greedy_action) + "," + csv_double(row.realized) +
               "\n";
    }
    return out;
}

std::string curve_to_csv(const std::vector<ThetaSample>& curve) {
    std::string out = "zeta1,theta\n";
    for (const auto& s : curve)
        out += csv_double(s.zeta1) + "," + csv_double(s.theta) + "\n";
    return out;
}

std::string mdp_to_json(const Mdp& m) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q += '\\';
            q += c;
        }
        return q + "\"";
    };
    auto id_list = [&](const std::vector<std::string>& ids) {
        std::string out = "[";
        for (std::size_t i = 0; i < ids.size(); ++i)
            out += (i ? ", " : "") + quote(ids[i]);
        return out + "]";
    };

    std::string out = "{\n";
    out += "  \"states\": " + id_list(m.state_ids()) + ",\n";
    out += "  \"actions\": " + id_list(m.action_ids()) + ",\n";
    out += "  \"horizon\": " + std::to_string(m.horizon()) + ",\n";

    out += "  \"available\": {";
    for (int s = 0; s < m.num_states(); ++s) {
        out += (s ? ", " : "") + quote(m.state_ids()[static_cast<std::size_t>(s)]) +
               ": [";
        const auto& acts = m.available(s);
        for (std::size_t i = 0; i < acts.size(); ++i)
            out += (i ? ", " : "") +
                   quote(m.action_ids()[static_cast<std::size_t>(acts[i])]);
        out += "]";
    }
    out += "},\n";

    std::string trans, rew;
    for (int s = 0; s < m.num_states(); ++s) {
        for (int a = 0; a < m.num_actions(); ++a) {
            for (int sp = 0; sp < m.num_states(); ++sp) {
                if (m.p(s, a, sp) == 0.0) continue;
                const std::string key =
                    "\"s\": " + quote(m.state_ids()[static_cast<std::size_t>(s)]) +
                    ", \"a\": " + quote(m.action_ids()[static_cast<std::size_t>(a)]) +
                    ", \"sp\": " + quote(m.state_ids()[static_cast<std::size_t>(sp)]);
                if (!trans.empty()) trans += ",\n";
                trans += "    {" + key + ", \"p\": " + json_number(m.p(s, a, sp)) + "}";
                if (m.r(s, a, sp) != 0.0) {
                    if (!rew.empty()) rew += ",\n";
                    rew += "    {" + key + ", \"r\": " + json_number(m.r(s, a, sp)) +
                           "}";
                }
            }
        }
    }
    out += "  \"transitions\": [\n" + trans + "\n  ],\n";
    if (!rew.empty()) out += "  \"rewards\": [\n" + rew + "\n  ],\n";

    out += "  \"initial\": {";
    for (int s = 0; s < m.num_states(); ++s) {
        out += (s ? ", " : "") + quote(m.state_ids()[static_cast<std::size_t>(s)]) +
               ": " + json_number(m.initial()[static_cast<std::size_t>(s)]);
    }
    return out + "}\n}\n";
}

} // namespace riskdp
