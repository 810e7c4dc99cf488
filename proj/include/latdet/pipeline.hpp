#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "latdet/mlp.hpp"
#include "latdet/sphere.hpp"

namespace latdet {

enum class DecodePath { Sphere, Fallback };

/* Outcome of one learned-radius decoding pass. path == Sphere with round
 * c means rounds 1..c-1 were empty and round c accepted; Fallback means
 * all q rounds were empty and the MMSE detector produced the solution.
 * visited/sphere_flops sum over all attempted rounds. */
struct PipelineResult {
    Eigen::VectorXcd solution;
    DecodePath path = DecodePath::Fallback;
    int round = 0; // 1..q when path == Sphere
    RadiusVector radii_used;
    std::vector<std::int64_t> visited;
    std::int64_t sphere_flops = 0;
    double accept_radius = 0.0; // radius of the accepting round, 0 on fallback
};

/* MMSE filter (H^H H + I/snr)^-1 H^H y rounded per real dimension to the
 * nearest constellation level. snr_linear is the average SNR. */
Eigen::VectorXcd mmse_detect(const Observation& obs, const Constellation& cst,
                             double snr_linear);

/* Radii the pipeline would use for this observation: network prediction
 * with non-finite entries replaced by the Babai distance, sorted
 * ascending, floored at 1e-9. */
RadiusVector dl_radii(const Observation& obs, const Constellation& cst,
                      const RadiusModel& model);

/* Learned-radius sphere decoding: predict q radii, post-process them
 * (non-finite entries replaced by the Babai distance, then sorted
 * ascending and floored at 1e-9), attempt sphere decoding per radius in
 * ascending order, fall back to MMSE when every sphere is empty. */
PipelineResult dl_sphere_decode(const Observation& obs,
                                const Constellation& cst,
                                const RadiusModel& model, int q);

struct BatchOptions {
    bool compute_points = true; // lattice points inside the accepting sphere
    int threads = 1;
};

struct BatchAggregate {
    std::size_t count = 0;
    double ber = 0.0; // NaN when any observation lacks truth
    double fallback_rate = 0.0;
    double mean_flops = 0.0; // includes f_dn, and f_sb on fallback
    std::int64_t max_flops = 0;
    double mean_points_in_sphere = 0.0; // 0 contribution from fallbacks
};

struct BatchResult {
    std::vector<PipelineResult> results;
    std::vector<std::int64_t> points_in_sphere; // empty unless requested
    BatchAggregate aggregate;
};

/* Maps dl_sphere_decode over the batch; aggregation is associative and
 * independent of the worker count. */
BatchResult decode_batch(const std::vector<Observation>& observations,
                         const Constellation& cst, const RadiusModel& model,
                         int q, const BatchOptions& opts = {});

} // namespace latdet
