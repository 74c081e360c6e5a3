#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "peakspam/distance_matrix.hpp"

namespace peakspam {

enum class Kernel { cutoff, gaussian };

struct DensityParams {
    Kernel kernel = Kernel::cutoff;
    // Fraction of all pairs that should fall below d_c.
    double t = 0.02;
    // Explicit cutoff radius; when set, t is ignored.
    std::optional<double> d_c;
};

inline constexpr double kRecommendedTMin = 0.01;
inline constexpr double kRecommendedTMax = 0.02;
inline bool t_in_recommended_range(double t) {
    return t >= kRecommendedTMin && t <= kRecommendedTMax;
}

// Per-point decision statistics. nearest_higher is empty only for the point
// that leads the density order.
struct PointStats {
    std::vector<double> rho;
    std::vector<double> delta;
    std::vector<double> gamma;
    std::vector<std::optional<std::size_t>> nearest_higher;

    std::size_t size() const { return rho.size(); }
};

struct ClusterModel {
    std::vector<std::size_t> centers;
    // Index into centers for every point.
    std::vector<std::size_t> assignment;
    std::vector<std::size_t> sizes;

    std::size_t cluster_count() const { return centers.size(); }
};

struct FixedCount {
    std::size_t k = 1;
};
struct GammaJump {
    double ratio = 3.0;
};
using CenterMode = std::variant<FixedCount, GammaJump>;

struct CenterSelection {
    std::vector<std::size_t> centers;
    // gamma_jump found no boundary and fell back to one center.
    bool fell_back = false;
};

enum class AssignmentRule { nearest_center, nearest_higher_neighbor };

// Threshold function of the cutoff kernel: 1 for negative arguments, else 0.
constexpr int chi(double x) { return x < 0.0 ? 1 : 0; }

/// Picks the cutoff radius so that round_half_up(t * M) of the M = N(N-1)/2
/// pair distances lie strictly below it: d_c is the k-th smallest distance,
/// k = round_half_up(t * M) + 1 clamped to [1, M]. An explicit
/// params.d_c is returned unchanged. If the k-th distance is zero (duplicate
/// points) the smallest positive distance is used instead.
///
/// Throws TooFewPointsError for N < 2, ParamError for t outside (0, 1) or a
/// non-positive explicit d_c, and DegenerateDistancesError when every
/// distance is zero.
double select_dc(const DistanceMatrix& dm, const DensityParams& params);

// cutoff: number of other points strictly closer than d_c.
// gaussian: sum over other points of exp(-(d/d_c)^2), summed in index order.
std::vector<double> local_density(const DistanceMatrix& dm, double d_c, Kernel kernel,
                                  std::size_t threads = 0);

// Indices by descending rho; equal densities keep ascending index order.
std::vector<std::size_t> density_order(std::span<const double> rho);

struct DeltaResult {
    std::vector<double> delta;
    std::vector<std::optional<std::size_t>> nearest_higher;
};

// delta of the order leader is its largest distance to any point; every other
// point takes the distance to the closest point earlier in the order (the
// earliest such point on ties).
DeltaResult compute_delta(const DistanceMatrix& dm, std::span<const std::size_t> order,
                          std::size_t threads = 0);

std::vector<double> compute_gamma(std::span<const double> rho, std::span<const double> delta);

PointStats compute_point_stats(const DistanceMatrix& dm, double d_c, Kernel kernel,
                               std::size_t threads = 0);

// Point indices by descending gamma, ties by ascending index.
std::vector<std::size_t> gamma_ranking(std::span<const double> gamma);

/// fixed(k) takes the k largest gammas. gamma_jump(ratio) cuts the sorted
/// gamma curve at the first position where the previous value is at least
/// ratio times the current one (floored at 1e-12), and falls back to a single
/// center when the curve has no such jump.
CenterSelection select_centers(const PointStats& stats, const CenterMode& mode);

ClusterModel assign_points(const DistanceMatrix& dm, std::span<const std::size_t> centers,
                           AssignmentRule rule,
                           std::span<const std::optional<std::size_t>> nearest_higher);

struct DecisionRow {
    std::size_t id = 0;
    double rho = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    long cluster = -1;
};

// One row per point in input order; cluster is -1 without a model.
std::vector<DecisionRow> decision_graph_data(const PointStats& stats,
                                             const ClusterModel* model = nullptr);

// CSV `id,rho,delta,gamma,cluster` with six-decimal reals.
void write_decision_csv(std::ostream& out, std::span<const DecisionRow> rows);

std::string_view to_string(Kernel kernel);
std::string_view to_string(AssignmentRule rule);
Kernel parse_kernel(std::string_view name);
AssignmentRule parse_assignment_rule(std::string_view name);

nlohmann::ordered_json center_mode_json(const CenterMode& mode);

// {centers, assignment, sizes, params: {kernel, t, d_c, rule}}
nlohmann::ordered_json model_to_json(const ClusterModel& model, const DensityParams& params,
                                     double d_c, AssignmentRule rule);

}  // namespace peakspam
