#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peakspam/distance_matrix.hpp"
#include "peakspam/text_ingest.hpp"

namespace peakspam {

// Sentence polarities are rounded to this many units per 1.0 so that comment
// totals are exact integer sums (0.8 + -0.5 gives exactly 0.3).
inline constexpr std::int64_t kPolarityScale = 1'000'000'000;

std::int64_t polarity_to_units(double polarity);
inline double units_to_polarity(std::int64_t units) {
    return static_cast<double>(units) / static_cast<double>(kPolarityScale);
}

// Word polarities/subjectivities plus negation and intensifier tokens.
// Tokens are stored lowercase. Re-adding a token replaces its previous role.
class Lexicon {
public:
    struct Entry {
        double polarity = 0.0;
        double subjectivity = 0.0;
    };

    // Throw ParamError on out-of-range values.
    void add_word(std::string token, double polarity, double subjectivity);
    void add_negator(std::string token);
    void add_intensifier(std::string token, double multiplier);

    const Entry* find_word(std::string_view token) const;
    bool is_negator(std::string_view token) const;
    std::optional<double> intensifier(std::string_view token) const;

    std::size_t word_count() const { return words_.size(); }
    std::size_t negator_count() const { return negators_.size(); }
    std::size_t intensifier_count() const { return intensifiers_.size(); }
    bool empty() const { return word_count() + negator_count() + intensifier_count() == 0; }

private:
    void erase(std::string_view token);

    std::map<std::string, Entry, std::less<>> words_;
    std::map<std::string, bool, std::less<>> negators_;
    std::map<std::string, double, std::less<>> intensifiers_;
};

/// Parses the TSV lexicon format:
///
///     token<TAB>polarity<TAB>subjectivity[<TAB>class]
///
/// where class is `word` (default), `negator` or `intensifier:<multiplier>`.
/// Blank lines and lines starting with '#' are skipped. Range violations and
/// malformed lines throw LexiconError carrying the 1-based line number.
Lexicon parse_lexicon(std::string_view contents);
Lexicon load_lexicon(const std::filesystem::path& path);

// The lexicon shipped in data/default_lexicon.tsv, compiled in.
const Lexicon& default_lexicon();
std::string_view default_lexicon_tsv();

struct SentenceScore {
    double polarity = 0.0;
    double subjectivity = 0.0;
};

struct SentimentScore {
    std::vector<double> sentence_polarities;
    double total_polarity = 0.0;
    double mean_subjectivity = 0.0;
};

// Mean of the hit polarities (each scaled by intensifiers and by -0.5 per
// negator within the two preceding tokens), clamped to [-1, 1]. No hits
// scores (0, 0).
SentenceScore score_sentence(std::span<const std::string> tokens, const Lexicon& lexicon);

// Total polarity is the sum over sentences; subjectivity averages only the
// sentences that had at least one lexicon hit.
SentimentScore score_comment(const Comment& comment, const Lexicon& lexicon);

std::vector<SentimentScore> score_comments(std::span<const Comment> comments,
                                           const Lexicon& lexicon, std::size_t threads = 0);

// |x_i - x_j| over all pairs. Throws TooFewPointsError for fewer than 2 points.
DistanceMatrix distances_1d(std::span<const double> coords, std::size_t threads = 0);

// |total_i - total_j|, taken exactly on a fixed grid of 1/1024 polarity unit
// and rounded once, so equal gaps stay equal and shifting or scaling all
// totals moves every distance consistently. Totals are snapped to the grid.
DistanceMatrix pairwise_distances(std::span<const SentimentScore> scores, std::size_t threads = 0);

std::vector<double> total_polarities(std::span<const SentimentScore> scores);

// CSV `id,total_polarity,mean_subjectivity`, six decimals, ids 0..N-1.
void write_scores_csv(std::ostream& out, std::span<const SentimentScore> scores);

}  // namespace peakspam
