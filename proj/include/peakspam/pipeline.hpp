#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "peakspam/dpc.hpp"
#include "peakspam/sentiment.hpp"
#include "peakspam/text_ingest.hpp"

namespace peakspam {

// Flags clusters whose mean |total polarity| reaches the threshold.
struct ExtremeSentiment {
    double threshold = 0.5;
};
// Flags clusters holding at least `fraction` of the first k comments.
struct TopkDominance {
    std::size_t k = 20;
    double fraction = 0.6;
};
using FlagStrategy = std::variant<ExtremeSentiment, TopkDominance>;

inline constexpr std::size_t kMaxIterateDepth = 3;
inline constexpr std::size_t kMinSubclusterFloor = 4;

struct DetectionConfig {
    double t = 0.02;
    Kernel kernel = Kernel::cutoff;
    CenterMode center_mode = GammaJump{};
    AssignmentRule rule = AssignmentRule::nearest_center;
    FlagStrategy flag_strategy = ExtremeSentiment{};
    // Rows in the top-k membership table.
    std::size_t top_k = 20;
    // Levels of re-clustering applied to flagged clusters.
    std::size_t iterate_depth = 1;
    std::size_t min_subcluster = kMinSubclusterFloor;
    // Worker threads, 0 = default. Never affects results.
    std::size_t threads = 0;

    // Throws ParamError on any out-of-range field.
    void validate() const;
};

struct ClusterRow {
    std::size_t index = 0;
    std::size_t center_id = 0;
    std::size_t size = 0;
};

struct TopkRow {
    std::size_t rank = 0;  // 1-based
    std::size_t center_id = 0;
};

struct SubReport;

struct DetectionReport {
    std::vector<ClusterRow> clusters;
    std::vector<TopkRow> top_k;
    std::vector<std::size_t> flagged;
    std::vector<SubReport> subreports;

    // Comment ids of the points this report covers, in input order.
    std::vector<std::size_t> point_ids;
    double d_c = 0.0;
    PointStats stats;
    ClusterModel model;
    // Non-fatal conditions (t outside the recommended range, gamma_jump
    // fallback, skipped sub-clusterings). Not serialized.
    std::vector<std::string> warnings;
};

struct SubReport {
    std::size_t cluster = 0;
    DetectionReport report;
};

/// Scores the comments, clusters them by total polarity and flags suspect
/// clusters. Flagged clusters with at least min_subcluster members are
/// re-clustered from scratch while iterate_depth allows. Requires N >= 4.
DetectionReport run_detection(std::span<const Comment> comments, const Lexicon& lexicon,
                              const DetectionConfig& config);

// Same, starting from precomputed scores. Point i gets comment id i.
DetectionReport run_detection_on_scores(std::span<const SentimentScore> scores,
                                        const DetectionConfig& config);

std::vector<std::size_t> flag_suspect_clusters(const ClusterModel& model,
                                               std::span<const SentimentScore> scores,
                                               const FlagStrategy& strategy);

// Center comment id for each of the first min(k, N) points.
std::vector<TopkRow> topk_membership(const ClusterModel& model,
                                     std::span<const std::size_t> point_ids, std::size_t k);
std::vector<TopkRow> topk_membership(const ClusterModel& model,
                                     std::span<const Comment> comments, std::size_t k);

nlohmann::ordered_json config_to_json(const DetectionConfig& config);
nlohmann::ordered_json report_to_json(const DetectionReport& report,
                                      const DetectionConfig& config);

}  // namespace peakspam
