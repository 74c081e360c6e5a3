#include "peakspam/dpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "format.hpp"
#include "peakspam/errors.hpp"
#include "peakspam/parallel.hpp"

namespace peakspam {

namespace {

constexpr double kGammaFloor = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

double select_dc(const DistanceMatrix& dm, const DensityParams& params) {
    if (dm.size() < 2) throw TooFewPointsError("need at least 2 points to select d_c");
    if (params.d_c) {
        if (!(*params.d_c > 0.0) || !std::isfinite(*params.d_c)) {
            throw ParamError("explicit d_c must be a positive number");
        }
        return *params.d_c;
    }
    if (!(params.t > 0.0 && params.t < 1.0)) throw ParamError("t must lie in (0, 1)");

    std::vector<double> sorted(dm.condensed().begin(), dm.condensed().end());
    const std::size_t m = sorted.size();
    if (*std::max_element(sorted.begin(), sorted.end()) == 0.0) {
        throw DegenerateDistancesError("all pairwise distances are zero");
    }
    // round(t*M) pairs must fall strictly below d_c, so d_c is the next one up.
    const auto below = static_cast<std::size_t>(std::floor(params.t * static_cast<double>(m) + 0.5));
    const std::size_t k = std::clamp<std::size_t>(below + 1, 1, m);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end());
    const double d_k = sorted[k - 1];
    if (d_k > 0.0) return d_k;
    // Everything up to rank k is a duplicate pair; the next distinct distance
    // is the smallest radius that still separates anything.
    double smallest_positive = std::numeric_limits<double>::infinity();
    for (const double d : sorted) {
        if (d > 0.0) smallest_positive = std::min(smallest_positive, d);
    }
    return smallest_positive;
}

std::vector<double> local_density(const DistanceMatrix& dm, double d_c, Kernel kernel,
                                  std::size_t threads) {
    if (!(d_c > 0.0)) throw ParamError("d_c must be positive");
    const std::size_t n = dm.size();
    std::vector<double> rho(n, 0.0);
    if (kernel == Kernel::cutoff) {
        parallel_for(n, threads, [&](std::size_t i) {
            std::size_t count = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) count += static_cast<std::size_t>(chi(dm(i, j) - d_c));
            }
            rho[i] = static_cast<double>(count);
        });
    } else {
        parallel_for(n, threads, [&](std::size_t i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double r = dm(i, j) / d_c;
                sum += std::exp(-r * r);
            }
            rho[i] = sum;
        });
    }
    return rho;
}

std::vector<std::size_t> density_order(std::span<const double> rho) {
    std::vector<std::size_t> order(rho.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });
    return order;
}

DeltaResult compute_delta(const DistanceMatrix& dm, std::span<const std::size_t> order,
                          std::size_t threads) {
    const std::size_t n = dm.size();
    if (order.size() != n) throw ShapeError("density order length differs from point count");
    std::vector<bool> seen(n, false);
    for (const std::size_t i : order) {
        if (i >= n || seen[i]) throw ParamError("density order is not a permutation");
        seen[i] = true;
    }

    DeltaResult result{std::vector<double>(n, 0.0),
                       std::vector<std::optional<std::size_t>>(n, std::nullopt)};
    if (n == 0) return result;

    const std::size_t leader = order[0];
    double farthest = 0.0;
    for (std::size_t j = 0; j < n; ++j) farthest = std::max(farthest, dm(leader, j));
    result.delta[leader] = farthest;

    parallel_for(n - 1, threads, [&](std::size_t k) {
        const std::size_t pos = k + 1;
        const std::size_t point = order[pos];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_point = order[0];
        for (std::size_t earlier = 0; earlier < pos; ++earlier) {
            const double d = dm(point, order[earlier]);
            if (d < best) {
                best = d;
                best_point = order[earlier];
            }
        }
        result.delta[point] = best;
        result.nearest_higher[point] = best_point;
    });
    return result;
}

std::vector<double> compute_gamma(std::span<const double> rho, std::span<const double> delta) {
    if (rho.size() != delta.size()) throw ShapeError("rho and delta differ in length");
    std::vector<double> gamma(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) gamma[i] = rho[i] * delta[i];
    return gamma;
}

PointStats compute_point_stats(const DistanceMatrix& dm, double d_c, Kernel kernel,
                               std::size_t threads) {
    PointStats stats;
    stats.rho = local_density(dm, d_c, kernel, threads);
    const auto order = density_order(stats.rho);
    auto delta = compute_delta(dm, order, threads);
    stats.delta = std::move(delta.delta);
    stats.nearest_higher = std::move(delta.nearest_higher);
    stats.gamma = compute_gamma(stats.rho, stats.delta);
    return stats;
}

std::vector<std::size_t> gamma_ranking(std::span<const double> gamma) {
    std::vector<std::size_t> ranking(gamma.size());
    std::iota(ranking.begin(), ranking.end(), std::size_t{0});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [&](std::size_t a, std::size_t b) { return gamma[a] > gamma[b]; });
    return ranking;
}

CenterSelection select_centers(const PointStats& stats, const CenterMode& mode) {
    const std::size_t n = stats.gamma.size();
    if (n == 0) throw TooFewPointsError("no points to select centers from");
    const auto ranking = gamma_ranking(stats.gamma);

    CenterSelection selection;
    std::size_t count = 1;
    std::visit(Overloaded{
                   [&](const FixedCount& fixed) {
                       if (fixed.k < 1 || fixed.k > n) {
                           throw ParamError("center count " + std::to_string(fixed.k) +
                                            " outside [1, " + std::to_string(n) + "]");
                       }
                       count = fixed.k;
                   },
                   [&](const GammaJump& jump) {
                       if (!(jump.ratio > 1.0)) throw ParamError("gamma jump ratio must exceed 1");
                       selection.fell_back = true;
                       for (std::size_t pos = 1; pos < n; ++pos) {
                           const double before = stats.gamma[ranking[pos - 1]];
                           const double after = std::max(stats.gamma[ranking[pos]], kGammaFloor);
                           if (before >= jump.ratio * after) {
                               count = pos;
                               selection.fell_back = false;
                               break;
                           }
                       }
                   },
               },
               mode);
    selection.centers.assign(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(count));
    return selection;
}

ClusterModel assign_points(const DistanceMatrix& dm, std::span<const std::size_t> centers,
                           AssignmentRule rule,
                           std::span<const std::optional<std::size_t>> nearest_higher) {
    const std::size_t n = dm.size();
    if (centers.empty()) throw ParamError("at least one center is required");
    constexpr std::size_t unassigned = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> assignment(n, unassigned);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (centers[c] >= n) throw ParamError("center index out of range");
        if (assignment[centers[c]] != unassigned) throw ParamError("duplicate center index");
        assignment[centers[c]] = c;
    }

    auto nearest_center = [&](std::size_t point) {
        std::size_t best = 0;
        double best_d = dm(point, centers[0]);
        for (std::size_t c = 1; c < centers.size(); ++c) {
            const double d = dm(point, centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        return best;
    };

    if (rule == AssignmentRule::nearest_center) {
        for (std::size_t i = 0; i < n; ++i) {
            if (assignment[i] == unassigned) assignment[i] = nearest_center(i);
        }
    } else {
        if (nearest_higher.size() != n) {
            throw ShapeError("nearest_higher length differs from point count");
        }
        std::vector<std::size_t> chain;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t p = i;
            chain.clear();
            while (assignment[p] == unassigned) {
                chain.push_back(p);
                if (chain.size() > n) throw ParamError("nearest_higher links form a cycle");
                if (!nearest_higher[p]) {
                    // The order leader was not chosen as a center.
                    assignment[p] = nearest_center(p);
                    break;
                }
                p = *nearest_higher[p];
                if (p >= n) throw ParamError("nearest_higher index out of range");
            }
            for (const std::size_t q : chain) assignment[q] = assignment[p];
        }
    }

    ClusterModel model;
    model.centers.assign(centers.begin(), centers.end());
    model.sizes.assign(centers.size(), 0);
    for (const std::size_t a : assignment) ++model.sizes[a];
    model.assignment = std::move(assignment);
    return model;
}

std::vector<DecisionRow> decision_graph_data(const PointStats& stats, const ClusterModel* model) {
    const std::size_t n = stats.size();
    if (stats.delta.size() != n || stats.gamma.size() != n) {
        throw ShapeError("point statistics have mismatched lengths");
    }
    if (model != nullptr && model->assignment.size() != n) {
        throw ShapeError("cluster model covers a different number of points");
    }
    std::vector<DecisionRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = {i, stats.rho[i], stats.delta[i], stats.gamma[i],
                   model ? static_cast<long>(model->assignment[i]) : -1L};
    }
    return rows;
}

void write_decision_csv(std::ostream& out, std::span<const DecisionRow> rows) {
    out << "id,rho,delta,gamma,cluster\n";
    for (const auto& r : rows) {
        out << r.id << ',' << detail::fixed6(r.rho) << ',' << detail::fixed6(r.delta) << ','
            << detail::fixed6(r.gamma) << ',' << r.cluster << '\n';
    }
}

std::string_view to_string(Kernel kernel) {
    return kernel == Kernel::cutoff ? "cutoff" : "gaussian";
}

std::string_view to_string(AssignmentRule rule) {
    return rule == AssignmentRule::nearest_center ? "nearest_center" : "nearest_higher_neighbor";
}

Kernel parse_kernel(std::string_view name) {
    if (name == "cutoff") return Kernel::cutoff;
    if (name == "gaussian") return Kernel::gaussian;
    throw ParamError("unknown kernel '" + std::string(name) + "'");
}

AssignmentRule parse_assignment_rule(std::string_view name) {
    if (name == "nearest_center") return AssignmentRule::nearest_center;
    if (name == "nearest_higher_neighbor") return AssignmentRule::nearest_higher_neighbor;
    throw ParamError("unknown assignment rule '" + std::string(name) + "'");
}

nlohmann::ordered_json center_mode_json(const CenterMode& mode) {
    return std::visit(Overloaded{
                          [](const FixedCount& f) {
                              return nlohmann::ordered_json{{"mode", "fixed"}, {"k", f.k}};
                          },
                          [](const GammaJump& g) {
                              return nlohmann::ordered_json{{"mode", "gamma_jump"},
                                                            {"ratio", g.ratio}};
                          },
                      },
                      mode);
}

nlohmann::ordered_json model_to_json(const ClusterModel& model, const DensityParams& params,
                                     double d_c, AssignmentRule rule) {
    nlohmann::ordered_json j;
    j["centers"] = model.centers;
    j["assignment"] = model.assignment;
    j["sizes"] = model.sizes;
    j["params"] = {{"kernel", to_string(params.kernel)},
                   {"t", params.t},
                   {"d_c", d_c},
                   {"rule", to_string(rule)}};
    return j;
}

}  // namespace peakspam
