#include "peakspam/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "peakspam/errors.hpp"

namespace peakspam {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

std::string t_warning(double t) {
    std::ostringstream msg;
    msg << "t=" << t << " is outside the recommended range [" << kRecommendedTMin << ", "
        << kRecommendedTMax << "]";
    return msg.str();
}

DetectionReport detect_level(std::span<const SentimentScore> scores,
                             std::vector<std::size_t> point_ids, const DetectionConfig& config,
                             std::size_t depth_left) {
    const std::size_t n = scores.size();
    if (n < 4) throw TooFewPointsError("detection needs at least 4 comments");

    DetectionReport report;
    report.point_ids = std::move(point_ids);

    const DistanceMatrix dm = pairwise_distances(scores, config.threads);
    if (dm.max() == 0.0) {
        throw DegenerateDistancesError("all comments have the same sentiment score");
    }
    DensityParams density{config.kernel, config.t, std::nullopt};
    report.d_c = select_dc(dm, density);
    report.stats = compute_point_stats(dm, report.d_c, config.kernel, config.threads);

    const CenterSelection selection = select_centers(report.stats, config.center_mode);
    if (selection.fell_back) {
        report.warnings.push_back("gamma_jump found no jump in the gamma curve; using 1 center");
    }
    report.model =
        assign_points(dm, selection.centers, config.rule, report.stats.nearest_higher);

    for (std::size_t c = 0; c < report.model.cluster_count(); ++c) {
        report.clusters.push_back(
            {c, report.point_ids[report.model.centers[c]], report.model.sizes[c]});
    }
    report.top_k = topk_membership(report.model, report.point_ids, config.top_k);
    report.flagged = flag_suspect_clusters(report.model, scores, config.flag_strategy);

    if (depth_left == 0) return report;
    for (const std::size_t c : report.flagged) {
        if (report.model.sizes[c] < config.min_subcluster) continue;
        std::vector<SentimentScore> member_scores;
        std::vector<std::size_t> member_ids;
        for (std::size_t i = 0; i < n; ++i) {
            if (report.model.assignment[i] != c) continue;
            member_scores.push_back(scores[i]);
            member_ids.push_back(report.point_ids[i]);
        }
        try {
            SubReport sub{c, detect_level(member_scores, std::move(member_ids), config,
                                          depth_left - 1)};
            for (auto& w : sub.report.warnings) {
                report.warnings.push_back("cluster " + std::to_string(c) + ": " + w);
            }
            report.subreports.push_back(std::move(sub));
        } catch (const DegenerateDistancesError&) {
            report.warnings.push_back("cluster " + std::to_string(c) +
                                      ": members share one score; not re-clustered");
        } catch (const ParamError& e) {
            report.warnings.push_back("cluster " + std::to_string(c) +
                                      ": not re-clustered: " + e.what());
        }
    }
    return report;
}

}  // namespace

void DetectionConfig::validate() const {
    if (!(t > 0.0 && t < 1.0)) throw ParamError("t must lie in (0, 1)");
    if (iterate_depth > kMaxIterateDepth) {
        throw ParamError("iterate depth must not exceed " + std::to_string(kMaxIterateDepth));
    }
    if (min_subcluster < kMinSubclusterFloor) {
        throw ParamError("min_subcluster must be at least " + std::to_string(kMinSubclusterFloor));
    }
    if (top_k < 1) throw ParamError("top_k must be at least 1");
    std::visit(Overloaded{
                   [](const FixedCount& f) {
                       if (f.k < 1) throw ParamError("center count must be at least 1");
                   },
                   [](const GammaJump& g) {
                       if (!(g.ratio > 1.0)) throw ParamError("gamma jump ratio must exceed 1");
                   },
               },
               center_mode);
    std::visit(Overloaded{
                   [](const ExtremeSentiment& e) {
                       if (!(e.threshold >= 0.0)) throw ParamError("threshold must be >= 0");
                   },
                   [](const TopkDominance& d) {
                       if (d.k < 1) throw ParamError("dominance k must be at least 1");
                       if (!(d.fraction > 0.0 && d.fraction <= 1.0)) {
                           throw ParamError("dominance fraction must lie in (0, 1]");
                       }
                   },
               },
               flag_strategy);
}

DetectionReport run_detection_on_scores(std::span<const SentimentScore> scores,
                                        const DetectionConfig& config) {
    config.validate();
    std::vector<std::size_t> ids(scores.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    DetectionReport report = detect_level(scores, std::move(ids), config, config.iterate_depth);
    if (!t_in_recommended_range(config.t)) report.warnings.insert(report.warnings.begin(), t_warning(config.t));
    return report;
}

DetectionReport run_detection(std::span<const Comment> comments, const Lexicon& lexicon,
                              const DetectionConfig& config) {
    config.validate();
    const auto scores = score_comments(comments, lexicon, config.threads);
    return run_detection_on_scores(scores, config);
}

std::vector<std::size_t> flag_suspect_clusters(const ClusterModel& model,
                                               std::span<const SentimentScore> scores,
                                               const FlagStrategy& strategy) {
    if (model.assignment.size() != scores.size()) {
        throw ShapeError("cluster model and scores cover different points");
    }
    const std::size_t clusters = model.cluster_count();
    std::vector<std::size_t> flagged;
    std::visit(Overloaded{
                   [&](const ExtremeSentiment& e) {
                       std::vector<double> sum(clusters, 0.0);
                       std::vector<std::size_t> count(clusters, 0);
                       for (std::size_t i = 0; i < scores.size(); ++i) {
                           sum[model.assignment[i]] += std::fabs(scores[i].total_polarity);
                           ++count[model.assignment[i]];
                       }
                       for (std::size_t c = 0; c < clusters; ++c) {
                           if (count[c] > 0 &&
                               sum[c] / static_cast<double>(count[c]) >= e.threshold) {
                               flagged.push_back(c);
                           }
                       }
                   },
                   [&](const TopkDominance& d) {
                       const std::size_t window = std::min(d.k, scores.size());
                       if (window == 0) return;
                       std::vector<std::size_t> count(clusters, 0);
                       for (std::size_t i = 0; i < window; ++i) ++count[model.assignment[i]];
                       for (std::size_t c = 0; c < clusters; ++c) {
                           const double share =
                               static_cast<double>(count[c]) / static_cast<double>(window);
                           if (share >= d.fraction) flagged.push_back(c);
                       }
                   },
               },
               strategy);
    return flagged;
}

std::vector<TopkRow> topk_membership(const ClusterModel& model,
                                     std::span<const std::size_t> point_ids, std::size_t k) {
    if (k < 1) throw ParamError("k must be at least 1");
    if (point_ids.size() != model.assignment.size()) {
        throw ShapeError("point ids and cluster model differ in length");
    }
    const std::size_t rows = std::min(k, point_ids.size());
    std::vector<TopkRow> table;
    table.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        table.push_back({i + 1, point_ids[model.centers[model.assignment[i]]]});
    }
    return table;
}

std::vector<TopkRow> topk_membership(const ClusterModel& model,
                                     std::span<const Comment> comments, std::size_t k) {
    std::vector<std::size_t> ids;
    ids.reserve(comments.size());
    for (const auto& c : comments) ids.push_back(c.id);
    return topk_membership(model, ids, k);
}

nlohmann::ordered_json config_to_json(const DetectionConfig& config) {
    nlohmann::ordered_json j;
    j["t"] = config.t;
    j["kernel"] = to_string(config.kernel);
    j["centers"] = center_mode_json(config.center_mode);
    j["rule"] = to_string(config.rule);
    j["strategy"] = std::visit(
        Overloaded{
            [](const ExtremeSentiment& e) {
                return nlohmann::ordered_json{{"name", "extreme_sentiment"},
                                              {"threshold", e.threshold}};
            },
            [](const TopkDominance& d) {
                return nlohmann::ordered_json{
                    {"name", "topk_dominance"}, {"k", d.k}, {"fraction", d.fraction}};
            },
        },
        config.flag_strategy);
    j["top_k"] = config.top_k;
    j["iterate"] = config.iterate_depth;
    j["min_subcluster"] = config.min_subcluster;
    return j;
}

nlohmann::ordered_json report_to_json(const DetectionReport& report,
                                      const DetectionConfig& config) {
    nlohmann::ordered_json j;
    j["clusters"] = nlohmann::ordered_json::array();
    for (const auto& row : report.clusters) {
        j["clusters"].push_back(
            {{"index", row.index}, {"center_id", row.center_id}, {"size", row.size}});
    }
    j["top_k"] = nlohmann::ordered_json::array();
    for (const auto& row : report.top_k) {
        j["top_k"].push_back({{"rank", row.rank}, {"center_id", row.center_id}});
    }
    j["flagged"] = report.flagged;
    j["subreports"] = nlohmann::ordered_json::array();
    for (const auto& sub : report.subreports) {
        nlohmann::ordered_json entry;
        entry["cluster"] = sub.cluster;
        entry["member_ids"] = sub.report.point_ids;
        entry["report"] = report_to_json(sub.report, config);
        j["subreports"].push_back(std::move(entry));
    }
    auto params = config_to_json(config);
    params["d_c"] = report.d_c;
    j["params"] = std::move(params);
    return j;
}

}  // namespace peakspam
