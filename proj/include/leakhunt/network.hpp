#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "leakhunt/types.hpp"

namespace leakhunt {

enum class NodeKind { Junction, Reservoir };
enum class PipeStatus { Open, Closed };
enum class LeakModel { Power, Favad };
enum class HeadLossModel { HazenWilliams, DarcyWeisbach };
enum class ValveStatus { Active, Open, Closed };
enum class MeterTag { Boundary, Internal, Peripheral };

/** Per-pipe diffuse leakage parameters (outflow per unit length as a function
 *  of mean pipe pressure). */
struct LeakParams {
    LeakModel model = LeakModel::Power;
    scalar_t beta = 0.0;     // deterioration coefficient
    scalar_t alpha = 1.0;    // POWER exponent
    scalar_t m_coeff = 0.0;  // FAVAD pressure-enlargement coefficient, 1/m
};

struct Node {
    std::string id;
    scalar_t elevation = 0.0;  // m
    scalar_t demand = 0.0;     // m3/s, base value scaled by the cycle multiplier
    NodeKind kind = NodeKind::Junction;
    scalar_t head0 = 0.0;      // fixed head, reservoirs only (m)
    int dma = -1;              // index into Network::dma_ids, -1 for reservoirs
};

struct Pipe {
    std::string id;
    index_t from = -1;  // node index
    index_t to = -1;
    scalar_t length = 0.0;     // m
    scalar_t diameter = 0.0;   // m
    scalar_t roughness = 0.0;  // Hazen-Williams C, or mm for Darcy-Weisbach
    PipeStatus status = PipeStatus::Open;
    int dma = -1;
    LeakParams leak;
    // Original pipe id when this pipe is a half of a split pipe; equals `id`
    // otherwise. Keeps the inspection sequence expressed in original pipes.
    std::string origin_id;
};

/** Pressure-reducing valve; the minimal model pins downstream pressure to the
 *  setting when the unconstrained solution would exceed it. */
struct Valve {
    std::string id;
    index_t from = -1;
    index_t to = -1;
    scalar_t setting = 0.0;  // target downstream pressure, m
    ValveStatus status = ValveStatus::Active;
};

struct PressureMeter {
    index_t node = -1;
    MeterTag tag = MeterTag::Boundary;
};

struct MeterConfig {
    std::vector<PressureMeter> pressure;  // ordering defines the delta-vector layout
    std::vector<index_t> flow_pipes;      // DMA boundary flow meters
};

/** Wagner pressure-driven demand model: served demand is 0 at/below p_min,
 *  full at/above p_service, square-root interpolated between. */
struct DemandModel {
    scalar_t p_min = 0.0;      // m
    scalar_t p_service = 20.0; // m
};

struct OperativeCycle {
    scalar_t dt = 3600.0;                       // s
    std::vector<scalar_t> multipliers = {1.0};  // one steady state per entry
};

/** Punctual leak: circular orifice discharging by Torricelli's law. */
struct Orifice {
    index_t node = -1;
    scalar_t diameter = 0.0;     // m
    scalar_t cd = 0.6;           // discharge coefficient
    std::string origin_pipe_id;  // pipe the orifice was inserted into
};

struct Network {
    std::string name;
    HeadLossModel headloss = HeadLossModel::HazenWilliams;
    DemandModel demand_model;
    LeakParams leak_defaults;
    scalar_t orifice_cd = 0.6;
    OperativeCycle cycle;
    std::vector<std::string> dma_ids;
    std::vector<Node> nodes;
    std::vector<Pipe> pipes;
    std::vector<Valve> valves;
    std::vector<Orifice> orifices;
    MeterConfig meters;

    // Derived lookups; rebuilt by rebuild_index() after any structural change.
    std::vector<index_t> junctions;   // node indices, file order
    std::vector<index_t> reservoirs;
    std::vector<index_t> node_row;    // node index -> position within its kind's list
    std::unordered_map<std::string, index_t> node_index;
    std::unordered_map<std::string, index_t> pipe_index;
    std::unordered_map<std::string, int> dma_index;

    void rebuild_index();

    index_t n_nodes() const { return static_cast<index_t>(nodes.size()); }
    index_t n_pipes() const { return static_cast<index_t>(pipes.size()); }
    index_t n_junctions() const { return static_cast<index_t>(junctions.size()); }
    index_t n_reservoirs() const { return static_cast<index_t>(reservoirs.size()); }
    index_t n_dmas() const { return static_cast<index_t>(dma_ids.size()); }
    index_t n_meters() const { return static_cast<index_t>(meters.pressure.size()); }

    index_t node_id_to_index(const std::string& id) const;
    index_t pipe_id_to_index(const std::string& id) const;
    int dma_id_to_index(const std::string& id) const;
};

// File I/O --------------------------------------------------------------------

/** Load and fully validate a network file (throws ParseError / ValidationError). */
Network load_network(const std::filesystem::path& path);
Network network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const Network& net);  // canonical form
void save_network(const Network& net, const std::filesystem::path& path);

/** Validate all invariants; throws ValidationError listing every violation. */
void validate(const Network& net);

/** Fingerprints over the canonical serialized form / the meter layout. */
std::uint64_t network_fingerprint(const Network& net);
std::uint64_t meter_fingerprint(const Network& net);

// Topology --------------------------------------------------------------------

/** Topological incidence sub-matrices (A_pn over junctions, A_p0 over
 *  reservoirs). Convention: +1 at the pipe's to-node, -1 at its from-node. */
std::pair<sparse_t, sparse_t> incidence(const Network& net);

/** Replace pipe `pipe_id` by two half-length pipes joined at a new midpoint
 *  node carrying a circular orifice. Returns a modified copy. */
Network insert_midpoint_leak(const Network& net, const std::string& pipe_id,
                             scalar_t orifice_diameter);

/** Undo insert_midpoint_leak for `pipe_id`, restoring the original pipe. */
Network remove_midpoint_leak(const Network& net, const std::string& pipe_id);

struct DmaSubnetwork {
    std::vector<index_t> node_set;
    std::vector<index_t> pipe_set;   // open pipes only; boundary closed pipes excluded
    scalar_t total_length = 0.0;     // m
    index_t pipe_count = 0;
};

DmaSubnetwork dma_subnetwork(const Network& net, const std::string& dma_id);

/** Copy of `net` with a different pressure/flow meter layout. */
Network with_meters(const Network& net, MeterConfig meters);

/** Sum of open-pipe lengths (m). */
scalar_t total_network_length(const Network& net);

}  // namespace leakhunt
