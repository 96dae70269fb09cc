#include "treedual/io.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "treedual/errors.hpp"

namespace treedual {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            fail(path + "." + item.key(), "unknown key");
}

double get_number(const json& obj, const std::string& path, const char* key,
                  bool required, double fallback = 0.0) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

std::vector<double> get_vector(const json& obj, const std::string& path,
                               const char* key, size_t size) {
    if (!obj.contains(key)) fail(path + "." + key, "missing");
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != size) {
        std::ostringstream os;
        os << "expected an array of " << size << " numbers";
        fail(path + "." + key, os.str());
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + "." + key, "expected a number");
        out.push_back(e.get<double>());
    }
    return out;
}

struct RawNode {
    int parent;
    int time;
    double prob;
    double dkappa;
    double beta;
    bool has_beta;
    std::vector<double> prices;
    std::vector<double> payoffs;  // empty for internal nodes
    std::vector<int> children;
};

void parse_node(const json& obj, const std::string& path, int parent, int time,
                int n_assets, int n_claims, std::vector<RawNode>& nodes) {
    if (!obj.is_object()) fail(path, "expected an object");
    check_keys(obj, path,
               {"prob", "prices", "dkappa", "beta", "payoffs", "children"});
    RawNode node;
    node.parent = parent;
    node.time = time;
    node.prob = get_number(obj, path, "prob", parent >= 0, 1.0);
    node.dkappa = get_number(obj, path, "dkappa", true);
    node.has_beta = obj.contains("beta");
    node.beta = get_number(obj, path, "beta", false, 0.0);
    node.prices = get_vector(obj, path, "prices", static_cast<size_t>(n_assets));

    const int index = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (parent >= 0)
        nodes[static_cast<size_t>(parent)].children.push_back(index);

    const bool leaf = !obj.contains("children") || obj.at("children").empty();
    if (leaf) {
        nodes[static_cast<size_t>(index)].payoffs =
            get_vector(obj, path, "payoffs", static_cast<size_t>(n_claims));
    } else {
        if (obj.contains("payoffs"))
            fail(path + ".payoffs", "payoffs are defined only at leaves");
        const json& kids = obj.at("children");
        if (!kids.is_array()) fail(path + ".children", "expected an array");
        for (size_t k = 0; k < kids.size(); ++k) {
            std::ostringstream os;
            os << path << ".children[" << k << "]";
            parse_node(kids[k], os.str(), index, time + 1, n_assets, n_claims,
                       nodes);
        }
    }
}

std::vector<std::vector<double>> get_point_list(const json& obj,
                                                const std::string& path,
                                                const char* key, size_t dim) {
    std::vector<std::vector<double>> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    for (size_t i = 0; i < v.size(); ++i) {
        std::ostringstream os;
        os << path << "." << key << "[" << i << "]";
        if (!v[i].is_array()) fail(os.str(), "expected an array");
        std::vector<double> p;
        for (const auto& e : v[i]) {
            if (!e.is_number()) fail(os.str(), "expected a number");
            p.push_back(e.get<double>());
        }
        if (p.size() != dim) fail(os.str(), "wrong dimension");
        out.push_back(p);
    }
    return out;
}

std::vector<double> get_scalar_list(const json& obj, const std::string& path,
                                    const char* key) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    for (const auto& e : v) {
        if (!e.is_number()) fail(path + "." + key, "expected a number");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top level: expected an object");
    check_keys(doc, "top level",
               {"format", "assets", "claims", "clock_bound", "utility", "root",
                "queries"});
    double format = get_number(doc, "top level", "format", false, 1.0);
    if (format != 1.0) fail("top level.format", "unsupported format version");

    ScenarioFile file;
    file.scenario.n_assets =
        static_cast<int>(get_number(doc, "top level", "assets", true));
    file.scenario.n_claims =
        static_cast<int>(get_number(doc, "top level", "claims", true));
    if (file.scenario.n_assets < 1) fail("top level.assets", "need at least one asset");
    if (file.scenario.n_claims < 0) fail("top level.claims", "negative claim count");
    file.scenario.clock.bound = get_number(doc, "top level", "clock_bound", true);

    if (!doc.contains("utility")) fail("top level.utility", "missing");
    const json& ut = doc.at("utility");
    check_keys(ut, "utility", {"family", "gamma", "beta"});
    if (!ut.contains("family") || !ut.at("family").is_string())
        fail("utility.family", "expected \"log\" or \"power\"");
    std::string family = ut.at("family").get<std::string>();
    double base_beta = get_number(ut, "utility", "beta", false, 1.0);
    double gamma = 0.0;
    if (family == "log") {
        if (ut.contains("gamma")) fail("utility.gamma", "only valid for power");
    } else if (family == "power") {
        gamma = get_number(ut, "utility", "gamma", true);
    } else {
        fail("utility.family", "expected \"log\" or \"power\"");
    }

    if (!doc.contains("root")) fail("top level.root", "missing");
    std::vector<RawNode> raw;
    parse_node(doc.at("root"), "root", -1, 0, file.scenario.n_assets,
               file.scenario.n_claims, raw);

    std::vector<TreeNode> nodes(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        nodes[i].parent = raw[i].parent;
        nodes[i].time = raw[i].time;
        nodes[i].prob = raw[i].prob;
        nodes[i].children = raw[i].children;
    }
    file.scenario.tree = EventTree(std::move(nodes));
    for (const auto& rn : raw) {
        file.scenario.prices.push_back(rn.prices);
        file.scenario.clock.increments.push_back(rn.dkappa);
    }
    file.scenario.payoffs.resize(file.scenario.tree.leaves().size());
    for (size_t l = 0; l < file.scenario.tree.leaves().size(); ++l)
        file.scenario.payoffs[l] =
            raw[static_cast<size_t>(file.scenario.tree.leaves()[l])].payoffs;

    if (family == "log")
        file.field = UtilityField::log_utility(file.scenario.tree.size(), base_beta);
    else
        file.field =
            UtilityField::power_utility(file.scenario.tree.size(), gamma, base_beta);
    for (size_t i = 0; i < raw.size(); ++i)
        if (raw[i].has_beta) file.field.beta[i] = raw[i].beta;

    if (doc.contains("queries")) {
        const json& qs = doc.at("queries");
        check_keys(qs, "queries", {"x", "q", "y", "r"});
        file.query_x = get_scalar_list(qs, "queries", "x");
        file.query_y = get_scalar_list(qs, "queries", "y");
        file.query_q = get_point_list(qs, "queries", "q",
                                      static_cast<size_t>(file.scenario.n_claims));
        file.query_r = get_point_list(qs, "queries", "r",
                                      static_cast<size_t>(file.scenario.n_claims));
    }
    return file;
}

ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

namespace {

json node_to_json(const ScenarioFile& file, int index) {
    const TreeNode& node = file.scenario.tree.node(index);
    json obj;
    if (node.parent >= 0) obj["prob"] = node.prob;
    obj["prices"] = file.scenario.prices[static_cast<size_t>(index)];
    obj["dkappa"] = file.scenario.clock.increments[static_cast<size_t>(index)];
    obj["beta"] = file.field.beta[static_cast<size_t>(index)];
    if (node.is_leaf()) {
        obj["payoffs"] =
            file.scenario.payoffs[static_cast<size_t>(file.scenario.tree.leaf_index(index))];
    } else {
        json kids = json::array();
        for (int c : node.children) kids.push_back(node_to_json(file, c));
        obj["children"] = kids;
    }
    return obj;
}

}  // namespace

std::string serialize_scenario(const ScenarioFile& file) {
    json doc;
    doc["format"] = 1;
    doc["assets"] = file.scenario.n_assets;
    doc["claims"] = file.scenario.n_claims;
    doc["clock_bound"] = file.scenario.clock.bound;
    json ut;
    if (file.field.family == UtilityFamily::Log) {
        ut["family"] = "log";
    } else {
        ut["family"] = "power";
        ut["gamma"] = file.field.gamma;
    }
    ut["beta"] = 1.0;  // node weights are written per node
    doc["utility"] = ut;
    doc["root"] = node_to_json(file, 0);
    if (!file.query_x.empty() || !file.query_q.empty() || !file.query_y.empty() ||
        !file.query_r.empty()) {
        json qs;
        if (!file.query_x.empty()) qs["x"] = file.query_x;
        if (!file.query_q.empty()) qs["q"] = file.query_q;
        if (!file.query_y.empty()) qs["y"] = file.query_y;
        if (!file.query_r.empty()) qs["r"] = file.query_r;
        doc["queries"] = qs;
    }
    return doc.dump(2);
}

std::string scenario_digest(const ScenarioFile& file) {
    const std::string text = serialize_scenario(file);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace treedual
