#include "peakspam/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>

#include "format.hpp"
#include "peakspam/errors.hpp"
#include "peakspam/parallel.hpp"

namespace peakspam {

namespace {

constexpr double kNegationFactor = -0.5;
constexpr std::size_t kModifierWindow = 2;

std::string lowercase(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::optional<double> parse_real(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

namespace {
// Totals are compared on a grid 1024 times finer than the polarity unit, so
// halves (and other small binary fractions) of a unit survive scaling.
constexpr double kDistanceScale = static_cast<double>(kPolarityScale) * 1024.0;
}  // namespace

std::int64_t polarity_to_units(double polarity) {
    return std::llround(polarity * static_cast<double>(kPolarityScale));
}

void Lexicon::erase(std::string_view token) {
    if (auto it = words_.find(token); it != words_.end()) words_.erase(it);
    if (auto it = negators_.find(token); it != negators_.end()) negators_.erase(it);
    if (auto it = intensifiers_.find(token); it != intensifiers_.end()) intensifiers_.erase(it);
}

void Lexicon::add_word(std::string token, double polarity, double subjectivity) {
    if (!(polarity >= -1.0 && polarity <= 1.0)) throw ParamError("polarity outside [-1, 1]");
    if (!(subjectivity >= 0.0 && subjectivity <= 1.0)) {
        throw ParamError("subjectivity outside [0, 1]");
    }
    token = lowercase(std::move(token));
    erase(token);
    words_.emplace(std::move(token), Entry{polarity, subjectivity});
}

void Lexicon::add_negator(std::string token) {
    token = lowercase(std::move(token));
    erase(token);
    negators_.emplace(std::move(token), true);
}

void Lexicon::add_intensifier(std::string token, double multiplier) {
    if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
        throw ParamError("intensifier multiplier must be positive");
    }
    token = lowercase(std::move(token));
    erase(token);
    intensifiers_.emplace(std::move(token), multiplier);
}

const Lexicon::Entry* Lexicon::find_word(std::string_view token) const {
    const auto it = words_.find(token);
    return it == words_.end() ? nullptr : &it->second;
}

bool Lexicon::is_negator(std::string_view token) const { return negators_.contains(token); }

std::optional<double> Lexicon::intensifier(std::string_view token) const {
    const auto it = intensifiers_.find(token);
    if (it == intensifiers_.end()) return std::nullopt;
    return it->second;
}

Lexicon parse_lexicon(std::string_view contents) {
    if (!is_valid_utf8(contents)) throw IoError("lexicon is not valid UTF-8");
    Lexicon lexicon;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < contents.size()) {
        std::size_t end = contents.find('\n', start);
        if (end == std::string_view::npos) end = contents.size();
        std::string_view line = contents.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') {
            continue;
        }

        const auto fields = split_tabs(line);
        if (fields.size() < 3 || fields.size() > 4) {
            throw LexiconError(line_no, "expected 3 or 4 tab-separated fields");
        }
        const std::string token(fields[0]);
        if (token.empty()) throw LexiconError(line_no, "empty token");
        const auto polarity = parse_real(fields[1]);
        const auto subjectivity = parse_real(fields[2]);
        if (!polarity) throw LexiconError(line_no, "polarity is not a number");
        if (!subjectivity) throw LexiconError(line_no, "subjectivity is not a number");
        if (*polarity < -1.0 || *polarity > 1.0) {
            throw LexiconError(line_no, "polarity outside [-1, 1]");
        }
        if (*subjectivity < 0.0 || *subjectivity > 1.0) {
            throw LexiconError(line_no, "subjectivity outside [0, 1]");
        }

        const std::string_view cls = fields.size() == 4 ? fields[3] : std::string_view("word");
        constexpr std::string_view intensifier_prefix = "intensifier:";
        if (cls == "word") {
            lexicon.add_word(token, *polarity, *subjectivity);
        } else if (cls == "negator") {
            lexicon.add_negator(token);
        } else if (cls.starts_with(intensifier_prefix)) {
            const auto mult = parse_real(cls.substr(intensifier_prefix.size()));
            if (!mult || *mult <= 0.0) {
                throw LexiconError(line_no, "intensifier multiplier must be a positive number");
            }
            lexicon.add_intensifier(token, *mult);
        } else {
            throw LexiconError(line_no, "unknown entry class '" + std::string(cls) + "'");
        }
    }
    return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon " + path.string());
    const std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("failed reading lexicon " + path.string());
    return parse_lexicon(contents);
}

const Lexicon& default_lexicon() {
    static const Lexicon lexicon = parse_lexicon(default_lexicon_tsv());
    return lexicon;
}

namespace {

struct TokenScan {
    SentenceScore score;
    std::size_t hits = 0;
};

TokenScan scan_tokens(std::span<const std::string> tokens, const Lexicon& lexicon) {
    double polarity_sum = 0.0;
    double subjectivity_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto* entry = lexicon.find_word(tokens[i]);
        if (entry == nullptr) continue;
        double adjusted = entry->polarity;
        for (std::size_t back = 1; back <= kModifierWindow && back <= i; ++back) {
            const std::string& prev = tokens[i - back];
            if (const auto mult = lexicon.intensifier(prev)) adjusted *= *mult;
            if (lexicon.is_negator(prev)) adjusted *= kNegationFactor;
        }
        polarity_sum += adjusted;
        subjectivity_sum += entry->subjectivity;
        ++hits;
    }
    if (hits == 0) return {};
    const double mean = std::clamp(polarity_sum / static_cast<double>(hits), -1.0, 1.0);
    return {{units_to_polarity(polarity_to_units(mean)),
             subjectivity_sum / static_cast<double>(hits)},
            hits};
}

}  // namespace

SentenceScore score_sentence(std::span<const std::string> tokens, const Lexicon& lexicon) {
    return scan_tokens(tokens, lexicon).score;
}

SentimentScore score_comment(const Comment& comment, const Lexicon& lexicon) {
    SentimentScore score;
    score.sentence_polarities.reserve(comment.sentences.size());
    std::int64_t total_units = 0;
    double subjectivity_sum = 0.0;
    std::size_t opinionated = 0;
    for (const auto& sentence : comment.sentences) {
        const TokenScan scan = scan_tokens(tokenize(sentence), lexicon);
        score.sentence_polarities.push_back(scan.score.polarity);
        total_units += polarity_to_units(scan.score.polarity);
        if (scan.hits > 0) {
            subjectivity_sum += scan.score.subjectivity;
            ++opinionated;
        }
    }
    score.total_polarity = units_to_polarity(total_units);
    score.mean_subjectivity =
        opinionated == 0 ? 0.0 : subjectivity_sum / static_cast<double>(opinionated);
    return score;
}

std::vector<SentimentScore> score_comments(std::span<const Comment> comments,
                                           const Lexicon& lexicon, std::size_t threads) {
    std::vector<SentimentScore> scores(comments.size());
    parallel_for(comments.size(), threads,
                 [&](std::size_t i) { scores[i] = score_comment(comments[i], lexicon); });
    return scores;
}

DistanceMatrix distances_1d(std::span<const double> coords, std::size_t threads) {
    const std::size_t n = coords.size();
    if (n < 2) throw TooFewPointsError("need at least 2 points for pairwise distances");
    std::vector<double> condensed(DistanceMatrix::pair_count(n));
    parallel_for(n, threads, [&](std::size_t i) {
        std::size_t pos = i * n - i * (i + 1) / 2;
        for (std::size_t j = i + 1; j < n; ++j) condensed[pos++] = std::fabs(coords[i] - coords[j]);
    });
    return DistanceMatrix(n, std::move(condensed));
}

std::vector<double> total_polarities(std::span<const SentimentScore> scores) {
    std::vector<double> totals;
    totals.reserve(scores.size());
    for (const auto& s : scores) totals.push_back(s.total_polarity);
    return totals;
}

DistanceMatrix pairwise_distances(std::span<const SentimentScore> scores, std::size_t threads) {
    const std::size_t n = scores.size();
    if (n < 2) throw TooFewPointsError("need at least 2 comments for pairwise distances");
    std::vector<std::int64_t> units(n);
    for (std::size_t i = 0; i < n; ++i) {
        units[i] = std::llround(scores[i].total_polarity * kDistanceScale);
    }
    std::vector<double> condensed(DistanceMatrix::pair_count(n));
    parallel_for(n, threads, [&](std::size_t i) {
        std::size_t pos = i * n - i * (i + 1) / 2;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::int64_t diff = units[i] - units[j];
            condensed[pos++] = static_cast<double>(diff < 0 ? -diff : diff) / kDistanceScale;
        }
    });
    return DistanceMatrix(n, std::move(condensed));
}

void write_scores_csv(std::ostream& out, std::span<const SentimentScore> scores) {
    out << "id,total_polarity,mean_subjectivity\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out << i << ',' << detail::fixed6(scores[i].total_polarity) << ','
            << detail::fixed6(scores[i].mean_subjectivity) << '\n';
    }
}

}  // namespace peakspam
