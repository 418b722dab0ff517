#include "leakhunt/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "leakhunt/errors.hpp"
#include "leakhunt/util.hpp"

namespace leakhunt {

using nlohmann::json;

void Network::rebuild_index() {
    junctions.clear();
    reservoirs.clear();
    node_index.clear();
    pipe_index.clear();
    dma_index.clear();
    node_row.assign(nodes.size(), -1);
    for (index_t i = 0; i < n_nodes(); ++i) {
        node_index.emplace(nodes[i].id, i);
        if (nodes[i].kind == NodeKind::Junction) {
            node_row[i] = static_cast<index_t>(junctions.size());
            junctions.push_back(i);
        } else {
            node_row[i] = static_cast<index_t>(reservoirs.size());
            reservoirs.push_back(i);
        }
    }
    for (index_t i = 0; i < n_pipes(); ++i) {
        pipe_index.emplace(pipes[i].id, i);
    }
    for (int i = 0; i < static_cast<int>(dma_ids.size()); ++i) {
        dma_index.emplace(dma_ids[i], i);
    }
}

index_t Network::node_id_to_index(const std::string& id) const {
    auto it = node_index.find(id);
    if (it == node_index.end()) throw std::invalid_argument("unknown node id: " + id);
    return it->second;
}

index_t Network::pipe_id_to_index(const std::string& id) const {
    auto it = pipe_index.find(id);
    if (it == pipe_index.end()) throw std::invalid_argument("unknown pipe id: " + id);
    return it->second;
}

int Network::dma_id_to_index(const std::string& id) const {
    auto it = dma_index.find(id);
    if (it == dma_index.end()) throw std::invalid_argument("unknown dma id: " + id);
    return it->second;
}

// ----------------------------------------------------------------------------
// JSON parsing
// ----------------------------------------------------------------------------

namespace {

[[noreturn]] void fail_field(const std::string& where, const std::string& what) {
    throw ParseError("in " + where + ": " + what);
}

scalar_t get_number(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) fail_field(where, "missing field '" + key + "'");
    if (!j[key].is_number()) fail_field(where, "field '" + key + "' must be a number");
    return j[key].get<scalar_t>();
}

scalar_t get_number_or(const json& j, const std::string& key, scalar_t fallback) {
    if (!j.contains(key)) return fallback;
    return j[key].get<scalar_t>();
}

std::string get_string(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key)) fail_field(where, "missing field '" + key + "'");
    if (!j[key].is_string()) fail_field(where, "field '" + key + "' must be a string");
    return j[key].get<std::string>();
}

LeakParams parse_leak(const json& j, const std::string& where, const LeakParams& defaults) {
    LeakParams p = defaults;
    if (j.contains("model")) {
        std::string m = j["model"].get<std::string>();
        if (m == "POWER") {
            p.model = LeakModel::Power;
        } else if (m == "FAVAD") {
            p.model = LeakModel::Favad;
        } else {
            fail_field(where, "unknown leak model '" + m + "'");
        }
    }
    p.beta = get_number_or(j, "beta", p.beta);
    p.alpha = get_number_or(j, "alpha", p.alpha);
    p.m_coeff = get_number_or(j, "m_coeff", p.m_coeff);
    return p;
}

json leak_to_json(const LeakParams& p) {
    return json{{"model", p.model == LeakModel::Power ? "POWER" : "FAVAD"},
                {"beta", p.beta},
                {"alpha", p.alpha},
                {"m_coeff", p.m_coeff}};
}

MeterTag parse_tag(const std::string& s, const std::string& where) {
    if (s == "boundary") return MeterTag::Boundary;
    if (s == "internal") return MeterTag::Internal;
    if (s == "peripheral") return MeterTag::Peripheral;
    fail_field(where, "unknown meter tag '" + s + "'");
}

const char* tag_name(MeterTag t) {
    switch (t) {
        case MeterTag::Boundary: return "boundary";
        case MeterTag::Internal: return "internal";
        default: return "peripheral";
    }
}

}  // namespace

Network network_from_json(const json& j) {
    Network net;
    if (!j.is_object()) throw ParseError("network file: top level must be an object");
    if (!j.contains("format") || !j["format"].is_number_integer() || j["format"].get<int>() != 1) {
        throw ParseError("network file: missing or unsupported 'format' (expected 1)");
    }
    net.name = j.value("name", "");

    std::string hl = j.value("headloss_model", "hazen-williams");
    if (hl == "hazen-williams") {
        net.headloss = HeadLossModel::HazenWilliams;
    } else if (hl == "darcy-weisbach") {
        net.headloss = HeadLossModel::DarcyWeisbach;
    } else {
        throw ParseError("network file: unknown headloss_model '" + hl + "'");
    }

    if (j.contains("leak_model_defaults")) {
        net.leak_defaults = parse_leak(j["leak_model_defaults"], "leak_model_defaults", LeakParams{});
    }
    if (j.contains("demand_model")) {
        const json& dm = j["demand_model"];
        net.demand_model.p_min = get_number_or(dm, "p_min", 0.0);
        net.demand_model.p_service = get_number_or(dm, "p_service", 20.0);
    }
    net.orifice_cd = j.value("orifice_cd", 0.6);

    if (j.contains("demand_cycle")) {
        const json& dc = j["demand_cycle"];
        net.cycle.dt = get_number_or(dc, "dt", 3600.0);
        if (dc.contains("multipliers")) {
            net.cycle.multipliers = dc["multipliers"].get<std::vector<scalar_t>>();
        }
    }

    if (j.contains("dmas")) {
        net.dma_ids = j["dmas"].get<std::vector<std::string>>();
    }

    // Nodes first (pipes/valves/meters reference them by id).
    std::unordered_map<std::string, index_t> node_lookup;
    auto add_node = [&](Node n, const std::string& where) {
        if (node_lookup.count(n.id) != 0) fail_field(where, "duplicate node id '" + n.id + "'");
        node_lookup.emplace(n.id, static_cast<index_t>(net.nodes.size()));
        net.nodes.push_back(std::move(n));
    };

    for (const json& nj : j.value("nodes", json::array())) {
        const std::string where = "nodes[" + std::to_string(net.nodes.size()) + "]";
        Node n;
        n.id = get_string(nj, where, "id");
        n.elevation = get_number(nj, where, "elevation");
        n.demand = get_number_or(nj, "demand", 0.0);
        n.kind = NodeKind::Junction;
        if (nj.contains("dma")) {
            std::string d = nj["dma"].get<std::string>();
            auto it = std::find(net.dma_ids.begin(), net.dma_ids.end(), d);
            n.dma = it == net.dma_ids.end() ? -2 : static_cast<int>(it - net.dma_ids.begin());
            if (n.dma == -2) fail_field(where, "node '" + n.id + "' references unknown dma '" + d + "'");
        }
        add_node(std::move(n), where);
    }
    for (const json& rj : j.value("reservoirs", json::array())) {
        const std::string where = "reservoirs[]";
        Node n;
        n.id = get_string(rj, where, "id");
        n.elevation = get_number(rj, where, "elevation");
        n.head0 = get_number(rj, where, "head");
        n.kind = NodeKind::Reservoir;
        add_node(std::move(n), where);
    }

    std::set<std::string> pipe_ids;
    for (const json& pj : j.value("pipes", json::array())) {
        const std::string where = "pipes[" + std::to_string(net.pipes.size()) + "]";
        Pipe p;
        p.id = get_string(pj, where, "id");
        if (!pipe_ids.insert(p.id).second) fail_field(where, "duplicate pipe id '" + p.id + "'");
        std::string from = get_string(pj, where, "from");
        std::string to = get_string(pj, where, "to");
        auto fit = node_lookup.find(from);
        auto tit = node_lookup.find(to);
        if (fit == node_lookup.end()) fail_field(where, "unknown from-node '" + from + "'");
        if (tit == node_lookup.end()) fail_field(where, "unknown to-node '" + to + "'");
        p.from = fit->second;
        p.to = tit->second;
        p.length = get_number(pj, where, "length");
        p.diameter = get_number(pj, where, "diameter");
        p.roughness = get_number(pj, where, "roughness");
        std::string st = pj.value("status", "open");
        if (st == "open") {
            p.status = PipeStatus::Open;
        } else if (st == "closed") {
            p.status = PipeStatus::Closed;
        } else {
            fail_field(where, "unknown pipe status '" + st + "'");
        }
        if (pj.contains("dma")) {
            std::string d = pj["dma"].get<std::string>();
            auto it = std::find(net.dma_ids.begin(), net.dma_ids.end(), d);
            if (it == net.dma_ids.end()) fail_field(where, "pipe '" + p.id + "' references unknown dma '" + d + "'");
            p.dma = static_cast<int>(it - net.dma_ids.begin());
        }
        p.leak = pj.contains("leak") ? parse_leak(pj["leak"], where, net.leak_defaults)
                                     : net.leak_defaults;
        p.origin_id = p.id;
        net.pipes.push_back(std::move(p));
    }

    std::set<std::string> valve_ids;
    for (const json& vj : j.value("valves", json::array())) {
        const std::string where = "valves[]";
        Valve v;
        v.id = get_string(vj, where, "id");
        if (!valve_ids.insert(v.id).second) fail_field(where, "duplicate valve id '" + v.id + "'");
        std::string from = get_string(vj, where, "from");
        std::string to = get_string(vj, where, "to");
        auto fit = node_lookup.find(from);
        auto tit = node_lookup.find(to);
        if (fit == node_lookup.end()) fail_field(where, "unknown from-node '" + from + "'");
        if (tit == node_lookup.end()) fail_field(where, "unknown to-node '" + to + "'");
        v.from = fit->second;
        v.to = tit->second;
        v.setting = get_number(vj, where, "setting");
        std::string st = vj.value("status", "active");
        if (st == "active") {
            v.status = ValveStatus::Active;
        } else if (st == "open") {
            v.status = ValveStatus::Open;
        } else if (st == "closed") {
            v.status = ValveStatus::Closed;
        } else {
            fail_field(where, "unknown valve status '" + st + "'");
        }
        net.valves.push_back(std::move(v));
    }

    if (j.contains("meters")) {
        const json& mj = j["meters"];
        for (const json& pm : mj.value("pressure", json::array())) {
            const std::string where = "meters.pressure[]";
            PressureMeter m;
            std::string nid = get_string(pm, where, "node");
            auto it = node_lookup.find(nid);
            if (it == node_lookup.end()) fail_field(where, "unknown node '" + nid + "'");
            m.node = it->second;
            m.tag = parse_tag(pm.value("tag", "boundary"), where);
            net.meters.pressure.push_back(m);
        }
        for (const json& fm : mj.value("flow", json::array())) {
            const std::string where = "meters.flow[]";
            std::string pid = fm.get<std::string>();
            auto it = std::find_if(net.pipes.begin(), net.pipes.end(),
                                   [&](const Pipe& p) { return p.id == pid; });
            if (it == net.pipes.end()) fail_field(where, "unknown pipe '" + pid + "'");
            net.meters.flow_pipes.push_back(static_cast<index_t>(it - net.pipes.begin()));
        }
    }

    net.rebuild_index();
    return net;
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("network file " + path.string() + ": " + e.what());
    }
    Network net = network_from_json(j);
    if (net.name.empty()) net.name = path.stem().string();
    validate(net);
    return net;
}

json network_to_json(const Network& net) {
    json j;
    j["format"] = 1;
    j["name"] = net.name;
    j["headloss_model"] =
        net.headloss == HeadLossModel::HazenWilliams ? "hazen-williams" : "darcy-weisbach";
    j["demand_model"] = {{"p_min", net.demand_model.p_min}, {"p_service", net.demand_model.p_service}};
    j["leak_model_defaults"] = leak_to_json(net.leak_defaults);
    j["orifice_cd"] = net.orifice_cd;
    j["demand_cycle"] = {{"dt", net.cycle.dt}, {"multipliers", net.cycle.multipliers}};
    j["dmas"] = net.dma_ids;

    json nodes = json::array();
    json reservoirs = json::array();
    for (const Node& n : net.nodes) {
        if (n.kind == NodeKind::Junction) {
            json nj{{"id", n.id}, {"elevation", n.elevation}, {"demand", n.demand}};
            if (n.dma >= 0) nj["dma"] = net.dma_ids[n.dma];
            nodes.push_back(std::move(nj));
        } else {
            reservoirs.push_back(json{{"id", n.id}, {"elevation", n.elevation}, {"head", n.head0}});
        }
    }
    j["nodes"] = std::move(nodes);
    j["reservoirs"] = std::move(reservoirs);

    json pipes = json::array();
    for (const Pipe& p : net.pipes) {
        json pj{{"id", p.id},
                {"from", net.nodes[p.from].id},
                {"to", net.nodes[p.to].id},
                {"length", p.length},
                {"diameter", p.diameter},
                {"roughness", p.roughness},
                {"status", p.status == PipeStatus::Open ? "open" : "closed"}};
        if (p.dma >= 0) pj["dma"] = net.dma_ids[p.dma];
        pj["leak"] = leak_to_json(p.leak);
        pipes.push_back(std::move(pj));
    }
    j["pipes"] = std::move(pipes);

    json valves = json::array();
    for (const Valve& v : net.valves) {
        const char* st = v.status == ValveStatus::Active ? "active"
                         : v.status == ValveStatus::Open ? "open"
                                                         : "closed";
        valves.push_back(json{{"id", v.id},
                              {"from", net.nodes[v.from].id},
                              {"to", net.nodes[v.to].id},
                              {"setting", v.setting},
                              {"status", st}});
    }
    j["valves"] = std::move(valves);

    json pm = json::array();
    for (const PressureMeter& m : net.meters.pressure) {
        pm.push_back(json{{"node", net.nodes[m.node].id}, {"tag", tag_name(m.tag)}});
    }
    json fm = json::array();
    for (index_t p : net.meters.flow_pipes) fm.push_back(net.pipes[p].id);
    j["meters"] = {{"pressure", std::move(pm)}, {"flow", std::move(fm)}};
    return j;
}

void save_network(const Network& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write network file: " + path.string());
    out << network_to_json(net).dump(2) << "\n";
}

// ----------------------------------------------------------------------------
// Validation
// ----------------------------------------------------------------------------

void validate(const Network& net) {
    std::vector<std::string> errs;
    auto err = [&](std::string m) { errs.push_back(std::move(m)); };

    if (net.reservoirs.empty()) err("network has no reservoir");
    if (net.cycle.multipliers.empty()) err("demand cycle must have at least one multiplier");
    for (scalar_t m : net.cycle.multipliers) {
        if (!(m > 0)) err("demand cycle multipliers must be > 0");
    }
    if (!(net.demand_model.p_min >= 0) || !(net.demand_model.p_min < net.demand_model.p_service)) {
        err("demand model requires 0 <= p_min < p_service");
    }

    for (const Node& n : net.nodes) {
        if (!std::isfinite(n.elevation)) err("node '" + n.id + "': elevation not finite");
        if (n.kind == NodeKind::Junction) {
            if (n.demand < 0) err("node '" + n.id + "': required demand must be >= 0");
            if (n.dma < 0) err("node '" + n.id + "': junction has no dma");
        } else {
            if (n.demand != 0) err("reservoir '" + n.id + "': reservoirs carry no demand");
            if (n.dma >= 0) err("reservoir '" + n.id + "': reservoirs belong to no dma");
            if (!std::isfinite(n.head0)) err("reservoir '" + n.id + "': head not finite");
        }
    }

    auto check_leak = [&](const LeakParams& lp, const std::string& what) {
        if (lp.beta < 0) err(what + ": leak beta must be >= 0");
        if (lp.alpha < 0.5 || lp.alpha > 2.5) err(what + ": leak alpha must be in [0.5, 2.5]");
        if (lp.m_coeff < 0) err(what + ": leak m_coeff must be >= 0");
    };
    check_leak(net.leak_defaults, "leak_model_defaults");

    for (const Pipe& p : net.pipes) {
        if (!(p.length > 0)) err("pipe '" + p.id + "': length must be > 0");
        if (!(p.diameter > 0)) err("pipe '" + p.id + "': diameter must be > 0");
        if (!(p.roughness > 0)) err("pipe '" + p.id + "': roughness must be > 0");
        if (p.from == p.to) err("pipe '" + p.id + "': from and to must differ");
        if (p.dma < 0) err("pipe '" + p.id + "': pipe has no dma");
        check_leak(p.leak, "pipe '" + p.id + "'");
    }
    for (const Valve& v : net.valves) {
        if (v.setting < 0) err("valve '" + v.id + "': setting must be >= 0");
        if (v.from == v.to) err("valve '" + v.id + "': from and to must differ");
    }
    for (const PressureMeter& m : net.meters.pressure) {
        if (net.nodes[m.node].kind != NodeKind::Junction) {
            err("pressure meter at '" + net.nodes[m.node].id + "': meters must sit on junctions");
        }
    }

    // Connectivity over open pipes and non-closed valves.
    if (!net.nodes.empty()) {
        std::vector<std::vector<index_t>> adj(net.nodes.size());
        for (const Pipe& p : net.pipes) {
            if (p.status != PipeStatus::Open) continue;
            adj[p.from].push_back(p.to);
            adj[p.to].push_back(p.from);
        }
        for (const Valve& v : net.valves) {
            if (v.status == ValveStatus::Closed) continue;
            adj[v.from].push_back(v.to);
            adj[v.to].push_back(v.from);
        }
        std::vector<char> seen(net.nodes.size(), 0);
        std::queue<index_t> q;
        for (index_t r : net.reservoirs) {
            seen[r] = 1;
            q.push(r);
        }
        while (!q.empty()) {
            index_t u = q.front();
            q.pop();
            for (index_t v : adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
            }
        }
        for (index_t i = 0; i < net.n_nodes(); ++i) {
            if (!seen[i]) err("node '" + net.nodes[i].id + "': not connected to any reservoir");
        }
    }

    if (!errs.empty()) throw ValidationError(std::move(errs));
}

// ----------------------------------------------------------------------------
// Fingerprints
// ----------------------------------------------------------------------------

std::uint64_t network_fingerprint(const Network& net) {
    return fnv1a64(network_to_json(net).dump());
}

std::uint64_t meter_fingerprint(const Network& net) {
    std::string s;
    for (const PressureMeter& m : net.meters.pressure) {
        s += net.nodes[m.node].id;
        s += '|';
        s += tag_name(m.tag);
        s += ';';
    }
    s += '#';
    for (index_t p : net.meters.flow_pipes) {
        s += net.pipes[p].id;
        s += ';';
    }
    return fnv1a64(s);
}

// ----------------------------------------------------------------------------
// Topology operations
// ----------------------------------------------------------------------------

std::pair<sparse_t, sparse_t> incidence(const Network& net) {
    sparse_t a_pn(net.n_pipes(), net.n_junctions());
    sparse_t a_p0(net.n_pipes(), net.n_reservoirs());
    std::vector<Eigen::Triplet<scalar_t>> tn, t0;
    tn.reserve(2 * net.pipes.size());
    for (index_t k = 0; k < net.n_pipes(); ++k) {
        const Pipe& p = net.pipes[k];
        auto place = [&](index_t node, scalar_t sign) {
            if (net.nodes[node].kind == NodeKind::Junction) {
                tn.emplace_back(k, net.node_row[node], sign);
            } else {
                t0.emplace_back(k, net.node_row[node], sign);
            }
        };
        place(p.to, 1.0);
        place(p.from, -1.0);
    }
    a_pn.setFromTriplets(tn.begin(), tn.end());
    a_p0.setFromTriplets(t0.begin(), t0.end());
    return {std::move(a_pn), std::move(a_p0)};
}

Network insert_midpoint_leak(const Network& net, const std::string& pipe_id,
                             scalar_t orifice_diameter) {
    index_t k = net.pipe_id_to_index(pipe_id);
    const Pipe& p = net.pipes[k];
    if (p.status != PipeStatus::Open) {
        throw std::invalid_argument("insert_midpoint_leak: pipe '" + pipe_id + "' is closed");
    }
    if (!(orifice_diameter >= 0)) {
        throw std::invalid_argument("insert_midpoint_leak: orifice diameter must be >= 0");
    }

    Network out = net;
    Node leak_node;
    leak_node.id = pipe_id + "+leak";
    if (out.node_index.count(leak_node.id) != 0) {
        throw std::invalid_argument("insert_midpoint_leak: node id '" + leak_node.id + "' already in use");
    }
    leak_node.elevation = 0.5 * (net.nodes[p.from].elevation + net.nodes[p.to].elevation);
    leak_node.demand = 0.0;
    leak_node.kind = NodeKind::Junction;
    leak_node.dma = p.dma;
    out.nodes.push_back(leak_node);
    index_t leak_idx = out.n_nodes() - 1;

    Pipe a = p, b = p;
    a.id = pipe_id + "+a";
    b.id = pipe_id + "+b";
    a.origin_id = b.origin_id = pipe_id;
    a.length = b.length = 0.5 * p.length;  // beta unchanged: leakage is per unit length
    a.to = leak_idx;
    b.from = leak_idx;
    out.pipes[k] = a;
    out.pipes.insert(out.pipes.begin() + k + 1, b);

    out.orifices.push_back(Orifice{leak_idx, orifice_diameter, net.orifice_cd, pipe_id});
    out.rebuild_index();
    return out;
}

Network remove_midpoint_leak(const Network& net, const std::string& pipe_id) {
    index_t a = -1, b = -1;
    for (index_t k = 0; k < net.n_pipes(); ++k) {
        const Pipe& p = net.pipes[k];
        if (p.origin_id == pipe_id && p.id != pipe_id) {
            if (a < 0) {
                a = k;
            } else {
                b = k;
            }
        }
    }
    if (a < 0 || b < 0) {
        throw std::invalid_argument("remove_midpoint_leak: pipe '" + pipe_id + "' has no inserted leak");
    }

    Network out = net;
    Pipe merged = net.pipes[a];
    merged.id = pipe_id;
    merged.origin_id = pipe_id;
    merged.length = net.pipes[a].length + net.pipes[b].length;
    merged.to = net.pipes[b].to;
    index_t leak_node = net.pipes[a].to;

    out.pipes[a] = merged;
    out.pipes.erase(out.pipes.begin() + b);
    out.orifices.erase(
        std::remove_if(out.orifices.begin(), out.orifices.end(),
                       [&](const Orifice& o) { return o.origin_pipe_id == pipe_id; }),
        out.orifices.end());

    // Drop the midpoint node and shift indices above it.
    out.nodes.erase(out.nodes.begin() + leak_node);
    auto shift = [&](index_t& n) {
        if (n > leak_node) --n;
    };
    for (Pipe& p : out.pipes) {
        shift(p.from);
        shift(p.to);
    }
    for (Valve& v : out.valves) {
        shift(v.from);
        shift(v.to);
    }
    for (PressureMeter& m : out.meters.pressure) shift(m.node);
    for (Orifice& o : out.orifices) shift(o.node);
    out.rebuild_index();
    return out;
}

DmaSubnetwork dma_subnetwork(const Network& net, const std::string& dma_id) {
    int d = net.dma_id_to_index(dma_id);
    DmaSubnetwork sub;
    std::set<index_t> nodes;
    for (index_t k = 0; k < net.n_pipes(); ++k) {
        const Pipe& p = net.pipes[k];
        if (p.dma != d || p.status != PipeStatus::Open) continue;
        sub.pipe_set.push_back(k);
        sub.total_length += p.length;
        nodes.insert(p.from);
        nodes.insert(p.to);
    }
    sub.pipe_count = static_cast<index_t>(sub.pipe_set.size());
    sub.node_set.assign(nodes.begin(), nodes.end());
    return sub;
}

Network with_meters(const Network& net, MeterConfig meters) {
    Network out = net;
    out.meters = std::move(meters);
    return out;
}

scalar_t total_network_length(const Network& net) {
    scalar_t total = 0.0;
    for (const Pipe& p : net.pipes) {
        if (p.status == PipeStatus::Open) total += p.length;
    }
    return total;
}

}  // namespace leakhunt
