#pragma once

#include <limits>
#include <vector>

#include "leakhunt/network.hpp"
#include "leakhunt/types.hpp"

namespace leakhunt {

struct SolverSettings {
    scalar_t head_tolerance = 1e-6;  // m, momentum residual bound
    scalar_t flow_tolerance = 1e-6;  // m3/s, nodal mass residual bound
    int max_iterations = 200;
    scalar_t under_relaxation = 1.0;  // initial Newton step scale, halved on residual increase
};

/** Solved steady state. Vectors are aligned with the Network the solve ran on
 *  (pipes/nodes/orifices in network order). */
struct HydraulicState {
    vector_t flow;              // per pipe, m3/s (positive from -> to; closed pipes 0)
    vector_t valve_flow;        // per valve, m3/s
    vector_t head;              // per node, m (reservoirs carry their fixed head)
    vector_t pipe_pressure;     // per pipe: mean of end pressures floored at 0, m
    vector_t diffuse_leak;      // per pipe, m3/s
    vector_t punctual_outflow;  // per orifice, m3/s
    vector_t served_demand;     // per node, m3/s (0 at reservoirs)
    bool converged = false;
    int iterations = 0;
    scalar_t momentum_residual = std::numeric_limits<scalar_t>::infinity();
    scalar_t mass_residual = std::numeric_limits<scalar_t>::infinity();
    scalar_t multiplier = 1.0;
    std::vector<std::uint8_t> valve_pinned;  // per valve: PRV actively pinning its setting
};

struct CycleSolution {
    std::vector<HydraulicState> states;  // one per multiplier
    HydraulicState mean;                 // arithmetic mean over the cycle
};

/** Signed head loss across a pipe carrying flow Q (odd in Q, increasing in |Q|). */
scalar_t head_loss(const Pipe& pipe, HeadLossModel model, scalar_t flow);

/** d(head_loss)/dQ, floored away from zero for Newton stability. */
scalar_t head_loss_gradient(const Pipe& pipe, HeadLossModel model, scalar_t flow);

/** Wagner pressure-driven served demand for one node. */
scalar_t served_demand(scalar_t pressure, scalar_t base_demand, scalar_t multiplier,
                       const DemandModel& model);
scalar_t served_demand_gradient(scalar_t pressure, scalar_t base_demand, scalar_t multiplier,
                                const DemandModel& model);

/** Diffuse leak outflow of a whole pipe at mean pressure `pressure` (m3/s). */
scalar_t pipe_diffuse_leak(const Pipe& pipe, scalar_t pressure);
scalar_t pipe_diffuse_leak_gradient(const Pipe& pipe, scalar_t pressure);

/** Torricelli orifice outflow (m3/s) for a circular orifice. */
scalar_t orifice_outflow(scalar_t diameter, scalar_t pressure, scalar_t cd);
scalar_t orifice_outflow_gradient(scalar_t diameter, scalar_t pressure, scalar_t cd);

/** Solve one steady state at the given demand multiplier. Non-convergence is
 *  reported through the returned state's `converged` flag; a junction with no
 *  path to a fixed-head node raises SolveError. */
HydraulicState solve_steady_state(const Network& net, scalar_t multiplier,
                                  const SolverSettings& settings = {});

/** Solve every multiplier of the cycle; throws SolveError naming the failing
 *  multiplier if any snapshot does not converge. */
CycleSolution solve_cycle(const Network& net, const OperativeCycle& cycle,
                          const SolverSettings& settings = {});

inline CycleSolution solve_cycle(const Network& net, const SolverSettings& settings = {}) {
    return solve_cycle(net, net.cycle, settings);
}

}  // namespace leakhunt
