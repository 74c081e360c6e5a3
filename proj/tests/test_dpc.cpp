#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "peakspam/dpc.hpp"
#include "peakspam/errors.hpp"
#include "peakspam/sentiment.hpp"

using namespace peakspam;

namespace {

using Opt = std::optional<std::size_t>;

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = fixtures::uniform(rng, -3.0, 3.0);
    return x;
}

PointStats stats_from(std::vector<double> rho, std::vector<double> delta,
                      std::vector<Opt> nearest_higher) {
    PointStats s;
    s.gamma = compute_gamma(rho, delta);
    s.rho = std::move(rho);
    s.delta = std::move(delta);
    s.nearest_higher = std::move(nearest_higher);
    return s;
}

// Scores [0, 0.1, 0.9] used by the worked examples.
DistanceMatrix three_points() { return distances_1d(std::vector<double>{0.0, 0.1, 0.9}); }

}  // namespace

TEST_CASE("chi truth table") {
    CHECK(chi(-1.0) == 1);
    CHECK(chi(-1e-15) == 1);
    CHECK(chi(0.0) == 0);
    CHECK(chi(-0.0) == 0);
    CHECK(chi(1e-15) == 0);
    CHECK(chi(1.0) == 0);
}

TEST_CASE("select_dc") {
    const DistanceMatrix dm(3, {0.1, 0.8, 0.9});
    // M = 3. t = 0.34: round(1.02) = 1 pair below, so d_c = d_2 = 0.8.
    CHECK(select_dc(dm, {Kernel::cutoff, 0.34, std::nullopt}) == 0.8);
    // t = 0.1: round(0.3) = 0 pairs below, d_c = d_1 = 0.1.
    CHECK(select_dc(dm, {Kernel::cutoff, 0.1, std::nullopt}) == 0.1);
    // t = 0.5: round(1.5) = 2 with half-up rounding, d_c = d_3 = 0.9.
    CHECK(select_dc(dm, {Kernel::cutoff, 0.5, std::nullopt}) == 0.9);
    // Clamped to M: d_c = d_max.
    CHECK(select_dc(dm, {Kernel::cutoff, 0.99, std::nullopt}) == 0.9);
    CHECK(select_dc(dm, {Kernel::cutoff, 0.5, 0.25}) == 0.25);

    CHECK_THROWS_AS(select_dc(DistanceMatrix(3, {0, 0, 0}), {}), DegenerateDistancesError);
    CHECK_THROWS_AS(select_dc(DistanceMatrix(1, {}), {}), TooFewPointsError);
    CHECK_THROWS_AS(select_dc(dm, {Kernel::cutoff, 1.5, std::nullopt}), ParamError);
    CHECK_THROWS_AS(select_dc(dm, {Kernel::cutoff, 0.02, -1.0}), ParamError);

    // Duplicate points: the k-th distance is 0, so the smallest positive one is used.
    const auto dup = distances_1d(std::vector<double>{0, 0, 0, 0, 1, 2});
    CHECK(select_dc(dup, {Kernel::cutoff, 0.1, std::nullopt}) == 1.0);
}

TEST_CASE("select_dc percentile property") {
    std::mt19937_64 rng(2024);
    for (const double t : {0.01, 0.02, 0.05}) {
        for (int round = 0; round < 20; ++round) {
            const auto x = random_scores(rng, 20 + rng() % 150);
            const auto dm = distances_1d(x);
            const double dc = select_dc(dm, {Kernel::cutoff, t, std::nullopt});
            std::size_t below = 0;
            for (const double d : dm.condensed()) below += d < dc;
            const double m = static_cast<double>(dm.condensed().size());
            CHECK(std::fabs(static_cast<double>(below) / m - t) <= 1.0 / m + 1e-15);
        }
    }
}

TEST_CASE("local_density") {
    const auto dm = three_points();
    CHECK(local_density(dm, 0.2, Kernel::cutoff) == std::vector<double>{1, 1, 0});
    // Below the smallest distance nothing is a neighbour.
    CHECK(local_density(dm, 0.05, Kernel::cutoff) == std::vector<double>{0, 0, 0});
    // Exactly at d_c does not count.
    CHECK(local_density(DistanceMatrix(2, {0.5}), 0.5, Kernel::cutoff) ==
          std::vector<double>{0, 0});

    const auto g = local_density(DistanceMatrix(2, {0.3}), 0.3, Kernel::gaussian);
    CHECK(g[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(g[0] == doctest::Approx(0.367879).epsilon(1e-6));
    CHECK(g[1] == g[0]);
    CHECK_THROWS_AS(local_density(dm, 0.0, Kernel::cutoff), ParamError);
}

TEST_CASE("density_order") {
    using V = std::vector<std::size_t>;
    CHECK(density_order(std::vector<double>{1, 1, 0}) == V{0, 1, 2});
    CHECK(density_order(std::vector<double>{2, 2, 2, 2}) == V{0, 1, 2, 3});
    CHECK(density_order(std::vector<double>{0, 5, 2}) == V{1, 2, 0});
}

TEST_CASE("compute_delta") {
    const auto dm = three_points();
    const std::vector<std::size_t> q = {0, 1, 2};
    const auto d = compute_delta(dm, q);
    CHECK(d.delta[0] == 0.9);
    CHECK(d.delta[1] == 0.1);
    CHECK(d.delta[2] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(d.nearest_higher == std::vector<Opt>{std::nullopt, 0, 1});

    const DistanceMatrix pair(2, {0.7});
    const auto p = compute_delta(pair, std::vector<std::size_t>{0, 1});
    CHECK(p.delta == std::vector<double>{0.7, 0.7});
    CHECK(p.nearest_higher == std::vector<Opt>{std::nullopt, 0});

    // The leader's delta is its farthest distance.
    const auto leader = compute_delta(dm, std::vector<std::size_t>{1, 0, 2});
    CHECK(leader.delta[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_FALSE(leader.nearest_higher[1].has_value());

    CHECK_THROWS_AS(compute_delta(dm, std::vector<std::size_t>{0, 0, 2}), ParamError);
    CHECK_THROWS_AS(compute_delta(dm, std::vector<std::size_t>{0, 1}), ShapeError);
}

TEST_CASE("compute_gamma") {
    CHECK(compute_gamma(std::vector<double>{2}, std::vector<double>{0.5}) ==
          std::vector<double>{1.0});
    CHECK(compute_gamma(std::vector<double>{0}, std::vector<double>{7.5}) ==
          std::vector<double>{0.0});
    CHECK(compute_gamma(std::vector<double>{1, 1, 0}, std::vector<double>{0.9, 0.1, 0.8}) ==
          std::vector<double>{0.9, 0.1, 0.0});
    CHECK_THROWS_AS(compute_gamma(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("select_centers") {
    const auto s = stats_from({1, 1, 0}, {0.9, 0.1, 0.8}, {std::nullopt, 0, 1});
    CHECK(select_centers(s, FixedCount{2}).centers == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(select_centers(s, FixedCount{4}), ParamError);
    CHECK_THROWS_AS(select_centers(s, FixedCount{0}), ParamError);

    PointStats jump;
    jump.gamma = {0.3, 5.0, 0.2, 4.8};
    const auto sel = select_centers(jump, GammaJump{3.0});
    CHECK(sel.centers == std::vector<std::size_t>{1, 3});
    CHECK_FALSE(sel.fell_back);

    PointStats flat;
    flat.gamma = {2.0, 2.0, 2.0, 2.0};
    const auto fb = select_centers(flat, GammaJump{3.0});
    CHECK(fb.centers == std::vector<std::size_t>{0});
    CHECK(fb.fell_back);

    PointStats zeros;
    zeros.gamma = {0.0, 0.0, 0.0};
    CHECK(select_centers(zeros, GammaJump{}).fell_back);

    // Trailing exact zeros: the floor keeps the comparison finite.
    PointStats tail;
    tail.gamma = {1.0, 0.0, 0.0};
    CHECK(select_centers(tail, GammaJump{}).centers == std::vector<std::size_t>{0});
    CHECK_FALSE(select_centers(tail, GammaJump{}).fell_back);

    CHECK_THROWS_AS(select_centers(flat, GammaJump{1.0}), ParamError);
}

TEST_CASE("assign_points") {
    // Scores: 1.0 (center), -1.0 (center), 0.4, 0.0.
    const auto dm = distances_1d(std::vector<double>{1.0, -1.0, 0.4, 0.0});
    const std::vector<Opt> none(4);
    const std::vector<std::size_t> centers = {0, 1};
    const auto m = assign_points(dm, centers, AssignmentRule::nearest_center, none);
    CHECK(m.assignment[2] == 0);
    CHECK(m.assignment[0] == 0);
    CHECK(m.assignment[1] == 1);
    // 0.0 is equidistant: earlier-listed center wins.
    CHECK(m.assignment[3] == 0);
    CHECK(m.sizes == std::vector<std::size_t>{3, 1});

    const std::vector<std::size_t> swapped = {1, 0};
    CHECK(assign_points(dm, swapped, AssignmentRule::nearest_center, none).assignment[3] == 0);

    const std::vector<std::size_t> dup = {0, 0};
    CHECK_THROWS_AS(assign_points(dm, dup, AssignmentRule::nearest_center, none), ParamError);
    CHECK_THROWS_AS(assign_points(dm, std::vector<std::size_t>{}, AssignmentRule::nearest_center,
                                  none),
                    ParamError);

    // Co-located centers still keep their own clusters.
    const auto same = distances_1d(std::vector<double>{0.5, 0.5, 2.0});
    const auto ms = assign_points(same, std::vector<std::size_t>{0, 1},
                                  AssignmentRule::nearest_center, std::vector<Opt>(3));
    CHECK(ms.assignment == std::vector<std::size_t>{0, 1, 0});
}

TEST_CASE("assign_points nearest_higher_neighbor") {
    // Chain 3 -> 2 -> 0, 4 -> 1.
    const auto dm = distances_1d(std::vector<double>{0.0, 5.0, 0.2, 0.3, 5.1});
    const std::vector<Opt> nh = {std::nullopt, 0, 0, 2, 1};
    const auto m = assign_points(dm, std::vector<std::size_t>{0, 1},
                                 AssignmentRule::nearest_higher_neighbor, nh);
    CHECK(m.assignment == std::vector<std::size_t>{0, 1, 0, 0, 1});
    CHECK(m.sizes == std::vector<std::size_t>{3, 2});

    // Leader not chosen as a center joins its nearest center.
    const auto m2 = assign_points(dm, std::vector<std::size_t>{4},
                                  AssignmentRule::nearest_higher_neighbor, nh);
    CHECK(m2.assignment == std::vector<std::size_t>{0, 0, 0, 0, 0});
}

TEST_CASE("decision_graph_data") {
    const auto s = stats_from({1, 1, 0}, {0.9, 0.1, 0.8}, {std::nullopt, 0, 1});
    auto rows = decision_graph_data(s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].gamma == 0.9);
    CHECK(rows[2].rho == 0.0);
    for (const auto& r : rows) CHECK(r.cluster == -1);

    ClusterModel m{{0, 1}, {0, 1, 0}, {2, 1}};
    rows = decision_graph_data(s, &m);
    CHECK(rows[1].cluster == 1);
    std::ostringstream out;
    write_decision_csv(out, rows);
    CHECK(out.str() ==
          "id,rho,delta,gamma,cluster\n0,1.000000,0.900000,0.900000,0\n"
          "1,1.000000,0.100000,0.100000,1\n2,0.000000,0.800000,0.000000,0\n");
}

TEST_CASE("two seeded modes hold the top gamma on a 28-point layout") {
    // Two dense modes plus three far outliers, mirroring a small decision diagram.
    std::mt19937_64 rng(28);
    std::vector<double> x;
    for (int i = 0; i < 11; ++i) x.push_back(fixtures::uniform(rng, -0.1, 0.1));
    for (int i = 0; i < 12; ++i) x.push_back(5.0 + fixtures::uniform(rng, -0.1, 0.1));
    x.push_back(0.0);  // mode of the first group
    x.push_back(5.0);  // mode of the second group
    x.push_back(12.0);
    x.push_back(-7.0);
    x.push_back(20.0);
    REQUIRE(x.size() == 28);
    const auto dm = distances_1d(x);
    const double dc = select_dc(dm, {Kernel::gaussian, 0.05, std::nullopt});
    const auto stats = compute_point_stats(dm, dc, Kernel::gaussian);
    const auto rank = gamma_ranking(stats.gamma);
    const std::set<std::size_t> top(rank.begin(), rank.begin() + 2);
    // One top point per mode.
    CHECK(top.size() == 2);
    CHECK(std::count_if(top.begin(), top.end(), [&](std::size_t i) { return x[i] < 2.5; }) == 1);
    CHECK(std::count_if(top.begin(), top.end(),
                        [&](std::size_t i) { return x[i] > 2.5 && x[i] < 6; }) == 1);
    // The outliers have small rho but large delta.
    for (std::size_t i = 25; i < 28; ++i) {
        CHECK(stats.rho[i] < stats.rho[rank[0]]);
        CHECK(stats.delta[i] > 1.0);
    }
}

TEST_CASE("oracle equivalence on random 1-D scores") {
    std::mt19937_64 rng(77);
    for (int round = 0; round < 40; ++round) {
        const auto x = random_scores(rng, 10 + rng() % 120);
        const double t = round % 2 ? 0.02 : 0.01;
        const auto dm = distances_1d(x);
        const double dc = select_dc(dm, {Kernel::cutoff, t, std::nullopt});
        const auto dense = oracle::dense_distances(x);
        REQUIRE(dc == oracle::cutoff_distance(dense, t));

        const auto rho = local_density(dm, dc, Kernel::cutoff);
        CHECK(rho == oracle::rho_cutoff(dense, dc));
        const auto rho_g = local_density(dm, dc, Kernel::gaussian);
        const auto rho_g_ref = oracle::rho_gaussian(dense, dc);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(std::fabs(rho_g[i] - rho_g_ref[i]) <= 1e-12 * std::fabs(rho_g_ref[i]));
        }

        const auto q = density_order(rho);
        CHECK(q == oracle::order(rho));
        const auto d = compute_delta(dm, q);
        const auto d_ref = oracle::delta(dense, q);
        CHECK(d.nearest_higher == d_ref.nearest_higher);
        CHECK(d.delta == d_ref.delta);
    }
}

TEST_CASE("scaling scores by c > 0") {
    // Scores on a 2^-20 grid so that scaling by 2.5 and all differences are exact.
    std::mt19937_64 rng(8);
    for (int round = 0; round < 20; ++round) {
        auto x = random_scores(rng, 20 + rng() % 100);
        for (auto& v : x) v = std::ldexp(std::round(std::ldexp(v, 20)), -20);
        std::vector<double> scaled(x);
        const double c = 2.5;
        for (auto& v : scaled) v *= c;
        const auto dm = distances_1d(x);
        const auto dm2 = distances_1d(scaled);
        const DensityParams params{Kernel::cutoff, 0.02, std::nullopt};
        const auto s1 = compute_point_stats(dm, select_dc(dm, params), Kernel::cutoff);
        const auto s2 = compute_point_stats(dm2, select_dc(dm2, params), Kernel::cutoff);
        CHECK(s1.rho == s2.rho);
        CHECK(s1.nearest_higher == s2.nearest_higher);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(s2.delta[i] == c * s1.delta[i]);
            CHECK(s2.gamma[i] == c * s1.gamma[i]);
        }
        const auto c1 = select_centers(s1, GammaJump{}).centers;
        const auto c2 = select_centers(s2, GammaJump{}).centers;
        CHECK(std::set<std::size_t>(c1.begin(), c1.end()) ==
              std::set<std::size_t>(c2.begin(), c2.end()));
        const auto a1 = assign_points(dm, c1, AssignmentRule::nearest_center, s1.nearest_higher);
        const auto a2 = assign_points(dm2, c2, AssignmentRule::nearest_center, s2.nearest_higher);
        CHECK(a1.assignment == a2.assignment);
    }
}

TEST_CASE("partition and determinism across worker counts") {
    std::mt19937_64 rng(4);
    for (int round = 0; round < 10; ++round) {
        const auto x = random_scores(rng, 50 + rng() % 300);
        const auto dm = distances_1d(x);
        const double dc = select_dc(dm, {});
        for (const Kernel kernel : {Kernel::cutoff, Kernel::gaussian}) {
            const auto a = compute_point_stats(dm, dc, kernel, 1);
            const auto b = compute_point_stats(dm, dc, kernel, 8);
            CHECK(std::memcmp(a.rho.data(), b.rho.data(), a.rho.size() * sizeof(double)) == 0);
            CHECK(std::memcmp(a.delta.data(), b.delta.data(), a.delta.size() * sizeof(double)) == 0);
            CHECK(a.nearest_higher == b.nearest_higher);
            CHECK(std::count_if(a.nearest_higher.begin(), a.nearest_higher.end(),
                                [](const Opt& o) { return !o; }) == 1);
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.gamma[i] == a.rho[i] * a.delta[i]);

            for (const auto rule :
                 {AssignmentRule::nearest_center, AssignmentRule::nearest_higher_neighbor}) {
                const auto centers = select_centers(a, FixedCount{1 + rng() % 5}).centers;
                const auto m = assign_points(dm, centers, rule, a.nearest_higher);
                std::size_t total = 0;
                for (const auto s : m.sizes) total += s;
                CHECK(total == x.size());
                for (std::size_t c = 0; c < centers.size(); ++c)
                    CHECK(m.assignment[centers[c]] == c);
                for (const auto asg : m.assignment) CHECK(asg < centers.size());
            }
        }
    }
}

TEST_CASE("model_to_json") {
    ClusterModel m{{2, 0}, {1, 0, 0}, {2, 1}};
    const auto j = model_to_json(m, {Kernel::cutoff, 0.02, std::nullopt}, 0.125,
                                 AssignmentRule::nearest_center);
    CHECK(j.dump() ==
          R"({"centers":[2,0],"assignment":[1,0,0],"sizes":[2,1],"params":{"kernel":"cutoff","t":0.02,"d_c":0.125,"rule":"nearest_center"}})");
}
