#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "latdet/constellation.hpp"
#include "latdet/mimo.hpp"

namespace latdet {

/* Result of one radius-bounded search. solution/dist2 are both present
 * exactly when the hypersphere contained a lattice point. visited[k-1]
 * counts candidate nodes whose partial metric passed the bound at
 * complex depth k (two consecutive real tree levels form one complex
 * dimension); flops = sum_k f_sp(k) * visited[k-1]. */
struct DecodeOutcome {
    std::optional<Eigen::VectorXcd> solution;
    std::optional<double> dist2;
    std::vector<std::int64_t> visited;
    std::int64_t flops = 0;
};

/* Ascending hypersphere radii, all > 0 (floored at 1e-9). */
struct RadiusVector {
    std::vector<double> radii;
};

enum class EnumMode {
    SchnorrEuchner, // children by increasing partial distance, running-best
                    // radius tightening after the first leaf
    FinckePohst     // fixed radius, no tightening; node counts match the
                    // analytical expected-complexity model
};

/* Thin QR of the real embedding: Q (2n x 2m) orthonormal columns,
 * R (2m x 2m) upper triangular with nonnegative diagonal. Throws
 * SingularChannelError on rank deficiency. */
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> qr_preprocess(
    const Eigen::MatrixXd& H_r);

/* Per-observation search context. Builds the column-interleaved real
 * embedding and its QR once; decode/count/collect reuse it across radii.
 * All methods are const and safe to call concurrently. */
class SphereSearch {
public:
    SphereSearch(const Observation& obs, const Constellation& cst);

    DecodeOutcome decode(double radius,
                         EnumMode mode = EnumMode::SchnorrEuchner) const;

    std::int64_t count_points(double radius) const;

    /* distances of all lattice points within radius; throws BudgetError
     * when more than budget points fall inside */
    std::vector<double> collect_distances(double radius,
                                          std::size_t budget) const;

    /* distance to the MMSE-rounded (Babai) point; any lattice point's
     * distance guarantees a nonempty sphere at that radius */
    double babai_distance() const;

    /* search-tree metric of a given constellation vector, evaluated with
     * the same arithmetic as the enumeration */
    double tree_metric(const Eigen::VectorXcd& s) const;

    /* radius certain to make decode() succeed: the Babai point's own
     * tree metric plus a relative cushion */
    double guaranteed_radius() const;

    const Observation& observation() const { return *obs_; }

private:
    template <typename LeafFn>
    void enumerate(double radius2, bool tighten, std::int64_t* visited,
                   LeafFn&& leaf) const;

    const Observation* obs_;
    const Constellation* cst_;
    int n_ = 0, m_ = 0;
    Eigen::MatrixXd R_;    // 2m x 2m
    Eigen::VectorXd qty_;  // Q^T y_r
    double rho_ = 0.0;     // ||y_r||^2 - ||Q^T y_r||^2, noise outside col(H_r)
    Eigen::VectorXcd babai_point_;
    double babai_dist_ = 0.0;
};

/* Free-function forms of the searches above. */
DecodeOutcome sphere_decode(const Observation& obs, const Constellation& cst,
                            double radius,
                            EnumMode mode = EnumMode::SchnorrEuchner);

std::int64_t count_points_in_sphere(const Observation& obs,
                                    const Constellation& cst, double radius);

/* Exact argmin of ||y - H s||^2 over all order^m candidates, ties broken
 * by lexicographic symbol-index order. Refuses (BudgetError) when
 * order^m exceeds budget. */
std::pair<Eigen::VectorXcd, double> brute_force_mld(
    const Observation& obs, const Constellation& cst,
    std::int64_t budget = 1 << 20);

/* The q smallest distinct distances from y to skewed-lattice points,
 * ascending, floored at 1e-9. Radius-growing enumeration starting from
 * the Babai distance. */
RadiusVector q_closest_distances(const Observation& obs,
                                 const Constellation& cst, int q,
                                 std::size_t budget = 1 << 22);

struct SdirsResult {
    Eigen::VectorXcd solution;
    int rounds_used = 0;
    std::vector<std::int64_t> visited; // summed over rounds, per depth
    std::int64_t flops = 0;            // sphere work over all rounds
    double accept_radius = 0.0;
    bool used_babai_round = false;
};

/* Sphere decoding with increasing radius search: round i uses the radius
 * solving reg_lower_gamma(r^2/sigma_w2, n) = 1 - 0.99^i; a final round
 * at the Babai distance guarantees termination. Exact MLD. */
SdirsResult sdirs_decode(const Observation& obs, const Constellation& cst,
                         int max_rounds = 1000);

} // namespace latdet
