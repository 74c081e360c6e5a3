// peakspam: sentiment scoring, density-peak clustering and suspect-cluster
// detection for review corpora.
//
// Exit codes: 0 success, 1 usage error, 2 data or runtime error.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "peakspam/dpc.hpp"
#include "peakspam/errors.hpp"
#include "peakspam/pipeline.hpp"
#include "peakspam/sentiment.hpp"
#include "peakspam/text_ingest.hpp"

namespace fs = std::filesystem;
using namespace peakspam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class T>
std::optional<T> parse_number(std::string_view s) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

// "auto", "auto:<ratio>" or a positive integer.
CenterMode parse_centers(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts[0] == "auto") {
        if (parts.size() == 1) return GammaJump{};
        const auto ratio = parts.size() == 2 ? parse_number<double>(parts[1]) : std::nullopt;
        if (!ratio || *ratio <= 1.0) throw UsageError("--centers auto:<ratio> needs ratio > 1");
        return GammaJump{*ratio};
    }
    const auto k = parse_number<std::size_t>(spec);
    if (!k || *k < 1) throw UsageError("--centers must be 'auto' or a positive integer");
    return FixedCount{*k};
}

// extreme_sentiment[:threshold] | topk_dominance[:k[:fraction]]
FlagStrategy parse_strategy(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts[0] == "extreme_sentiment" && parts.size() <= 2) {
        ExtremeSentiment s;
        if (parts.size() == 2) {
            const auto v = parse_number<double>(parts[1]);
            if (!v || *v < 0.0) throw UsageError("extreme_sentiment threshold must be >= 0");
            s.threshold = *v;
        }
        return s;
    }
    if (parts[0] == "topk_dominance" && parts.size() <= 3) {
        TopkDominance s;
        if (parts.size() >= 2) {
            const auto k = parse_number<std::size_t>(parts[1]);
            if (!k || *k < 1) throw UsageError("topk_dominance k must be a positive integer");
            s.k = *k;
        }
        if (parts.size() == 3) {
            const auto f = parse_number<double>(parts[2]);
            if (!f || *f <= 0.0 || *f > 1.0) {
                throw UsageError("topk_dominance fraction must lie in (0, 1]");
            }
            s.fraction = *f;
        }
        return s;
    }
    throw UsageError("unknown --strategy '" + spec + "'");
}

void check_t(double t) {
    if (!(t > 0.0 && t < 1.0)) throw UsageError("--t must lie strictly between 0 and 1");
}

void check_thread_env() {
    const char* env = std::getenv("PEAKSPAM_THREADS");
    if (env == nullptr) return;
    const auto n = parse_number<std::size_t>(env);
    if (!n || *n < 1) throw UsageError("PEAKSPAM_THREADS must be a positive integer");
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

// Writes every file to a temporary sibling first and renames only once all
// contents are on disk, so a failure leaves no partial outputs behind.
void write_outputs(const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> temps;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& [path, contents] : files) {
        fs::path tmp = path;
        tmp += ".tmp." + std::to_string(::getpid());
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out) {
            cleanup();
            throw IoError("cannot write " + path.string());
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::error_code ec;
        fs::rename(temps[i], files[i].first, ec);
        if (ec) {
            cleanup();
            throw IoError("cannot write " + files[i].first.string() + ": " + ec.message());
        }
    }
}

struct CorpusOptions {
    std::string input;
    std::string format;
    std::string lexicon;
};

struct ClusterOptions {
    double t = 0.02;
    std::optional<double> dc;
    std::string kernel = "cutoff";
    std::optional<std::string> centers;
    std::string rule = "nearest_center";
};

std::vector<SentimentScore> load_and_score(const CorpusOptions& opts) {
    const CorpusFormat format = opts.format.empty() ? corpus_format_from_path(opts.input)
                                                    : parse_corpus_format(opts.format);
    const Lexicon lexicon = load_lexicon(opts.lexicon);
    const auto comments = load_comments(opts.input, format);
    return score_comments(comments, lexicon);
}

void add_corpus_options(CLI::App& cmd, CorpusOptions& opts, bool with_format) {
    cmd.add_option("--input", opts.input, "Review corpus (csv or jsonl)")->required();
    if (with_format) {
        cmd.add_option("--format", opts.format, "Corpus format; inferred from extension if omitted")
            ->check(CLI::IsMember({"csv", "jsonl"}));
    }
    cmd.add_option("--lexicon", opts.lexicon, "Sentiment lexicon TSV")->required();
}

void add_cluster_options(CLI::App& cmd, ClusterOptions& opts) {
    cmd.add_option("--t", opts.t, "Fraction of pairs below d_c")->capture_default_str();
    cmd.add_option("--dc", opts.dc, "Explicit cutoff distance (overrides --t)");
    cmd.add_option("--kernel", opts.kernel, "Density kernel")
        ->check(CLI::IsMember({"cutoff", "gaussian"}))
        ->capture_default_str();
    cmd.add_option("--centers", opts.centers, "'auto', 'auto:<ratio>' or a center count");
    cmd.add_option("--rule", opts.rule, "Assignment rule")
        ->check(CLI::IsMember({"nearest_center", "nearest_higher_neighbor"}))
        ->capture_default_str();
}

struct Clustering {
    DistanceMatrix dm;
    DensityParams params;
    double d_c = 0.0;
    PointStats stats;
    std::optional<ClusterModel> model;
};

Clustering cluster_scores(const std::vector<SentimentScore>& scores, const ClusterOptions& opts,
                          bool require_model) {
    Clustering c;
    c.params = {parse_kernel(opts.kernel), opts.t, opts.dc};
    if (!opts.dc && !t_in_recommended_range(opts.t)) {
        warn("t=" + std::to_string(opts.t) + " is outside the recommended range [0.01, 0.02]");
    }
    c.dm = pairwise_distances(scores);
    c.d_c = select_dc(c.dm, c.params);
    c.stats = compute_point_stats(c.dm, c.d_c, c.params.kernel);
    if (opts.centers || require_model) {
        const auto selection = select_centers(c.stats, parse_centers(opts.centers.value_or("auto")));
        if (selection.fell_back) warn("no jump in the gamma curve; using 1 center");
        c.model = assign_points(c.dm, selection.centers, parse_assignment_rule(opts.rule),
                                c.stats.nearest_higher);
    }
    return c;
}

void validate_cluster_options(const ClusterOptions& opts) {
    check_t(opts.t);
    if (opts.dc && !(*opts.dc > 0.0)) throw UsageError("--dc must be positive");
    if (opts.centers) parse_centers(*opts.centers);
}

int run(int argc, char** argv) {
    CLI::App app{"Sentiment-based density-peak clustering for suspect review detection"};
    app.require_subcommand(1);

    // score
    CorpusOptions score_corpus;
    std::string score_output;
    auto* score = app.add_subcommand("score", "Write per-comment sentiment scores as CSV");
    add_corpus_options(*score, score_corpus, true);
    score->add_option("--output", score_output, "Scores CSV path")->required();

    // cluster
    CorpusOptions cluster_corpus;
    ClusterOptions cluster_opts;
    std::string cluster_output;
    auto* cluster = app.add_subcommand("cluster", "Cluster comments and write the model as JSON");
    add_corpus_options(*cluster, cluster_corpus, true);
    add_cluster_options(*cluster, cluster_opts);
    cluster->add_option("--output", cluster_output, "Model JSON path")->required();

    // decision-graph
    CorpusOptions graph_corpus;
    ClusterOptions graph_opts;
    std::string graph_output;
    auto* graph = app.add_subcommand("decision-graph", "Write rho/delta/gamma per comment as CSV");
    add_corpus_options(*graph, graph_corpus, true);
    add_cluster_options(*graph, graph_opts);
    graph->add_option("--output", graph_output, "Decision graph CSV path")->required();

    // detect
    CorpusOptions detect_corpus;
    std::string detect_kernel = "cutoff";
    std::string detect_centers = "auto";
    std::string detect_rule = "nearest_center";
    std::string detect_strategy = "extreme_sentiment";
    DetectionConfig config;
    std::string report_path;
    auto* detect = app.add_subcommand("detect", "Cluster, flag suspect clusters, write a report");
    add_corpus_options(*detect, detect_corpus, false);
    detect->add_option("--t", config.t, "Fraction of pairs below d_c")->capture_default_str();
    detect->add_option("--kernel", detect_kernel, "Density kernel")
        ->check(CLI::IsMember({"cutoff", "gaussian"}))
        ->capture_default_str();
    detect->add_option("--centers", detect_centers, "'auto', 'auto:<ratio>' or a center count")
        ->capture_default_str();
    detect->add_option("--rule", detect_rule, "Assignment rule")
        ->check(CLI::IsMember({"nearest_center", "nearest_higher_neighbor"}))
        ->capture_default_str();
    detect->add_option("--strategy", detect_strategy,
                       "extreme_sentiment[:threshold] or topk_dominance[:k[:fraction]]")
        ->capture_default_str();
    detect->add_option("--top-k", config.top_k, "Rows in the top-k membership table")
        ->capture_default_str();
    detect->add_option("--iterate", config.iterate_depth, "Re-clustering depth for flagged clusters")
        ->capture_default_str();
    detect->add_option("--report", report_path, "Report JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        check_thread_env();
        if (*cluster) validate_cluster_options(cluster_opts);
        if (*graph) validate_cluster_options(graph_opts);
        if (*detect) {
            check_t(config.t);
            config.kernel = parse_kernel(detect_kernel);
            config.rule = parse_assignment_rule(detect_rule);
            config.center_mode = parse_centers(detect_centers);
            config.flag_strategy = parse_strategy(detect_strategy);
            if (config.top_k < 1) throw UsageError("--top-k must be at least 1");
            if (config.iterate_depth > kMaxIterateDepth) {
                throw UsageError("--iterate must not exceed " + std::to_string(kMaxIterateDepth));
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*score) {
            const auto scores = load_and_score(score_corpus);
            std::ostringstream csv;
            write_scores_csv(csv, scores);
            write_outputs({{score_output, csv.str()}});
            double lo = scores.front().total_polarity;
            double hi = lo;
            for (const auto& s : scores) {
                lo = std::min(lo, s.total_polarity);
                hi = std::max(hi, s.total_polarity);
            }
            std::cerr << "scored " << scores.size() << " comments; total polarity range [" << lo
                      << ", " << hi << "]\n";
        } else if (*cluster) {
            const auto scores = load_and_score(cluster_corpus);
            const auto c = cluster_scores(scores, cluster_opts, true);
            const auto json = model_to_json(*c.model, c.params, c.d_c,
                                            parse_assignment_rule(cluster_opts.rule));
            write_outputs({{cluster_output, json.dump(2) + "\n"}});
            std::cerr << c.model->cluster_count() << " clusters over " << scores.size()
                      << " comments\n";
        } else if (*graph) {
            const auto scores = load_and_score(graph_corpus);
            const auto c = cluster_scores(scores, graph_opts, false);
            std::ostringstream csv;
            const auto rows = decision_graph_data(c.stats, c.model ? &*c.model : nullptr);
            write_decision_csv(csv, rows);
            write_outputs({{graph_output, csv.str()}});
        } else if (*detect) {
            const auto scores = load_and_score(detect_corpus);
            const auto report = run_detection_on_scores(scores, config);
            for (const auto& w : report.warnings) warn(w);

            std::ostringstream csv;
            const auto rows = decision_graph_data(report.stats, &report.model);
            write_decision_csv(csv, rows);
            fs::path decision_path = report_path;
            decision_path += ".decision.csv";
            write_outputs({{report_path, report_to_json(report, config).dump(2) + "\n"},
                           {decision_path, csv.str()}});

            std::cout << scores.size() << " comments, " << report.clusters.size()
                      << " clusters, " << report.flagged.size() << " flagged\n";
            for (const auto& row : report.clusters) {
                const bool flagged = std::find(report.flagged.begin(), report.flagged.end(),
                                               row.index) != report.flagged.end();
                std::cout << "cluster " << row.index << ": center " << row.center_id << ", size "
                          << row.size << (flagged ? "  [flagged]" : "") << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
