#pragma once

// Deterministic synthetic corpora for tests. Everything is derived from
// std::mt19937_64, whose output sequence is fixed by the standard.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

// Uniform in [0, 1) from the raw 64-bit engine output (portable, unlike
// std::uniform_real_distribution).
inline double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
}

// Three sentiment blobs around -0.8, 0.0 and +0.8 (30/40/30 comments) with
// offsets spread over a 0.02-wide window. Each comment's score comes from a
// private lexicon: an anchor sentence ("upbeat"/"downbeat", +-0.8) plus a
// sentence holding its own offset token "markNN".
struct BlobFixture {
    std::string lexicon_tsv;
    std::vector<std::string> texts;     // blob-by-blob: 30 negative, 40 neutral, 30 positive
    std::vector<double> totals;         // expected total polarity per text
    std::vector<std::size_t> blob;      // 0, 1 or 2 per text
};

inline constexpr std::uint64_t kBlobSeed = 0;
inline constexpr std::size_t kBlobSizes[3] = {30, 40, 30};
inline constexpr double kBlobSpread = 0.02;
inline constexpr double kBlobSeparation = 0.8;

BlobFixture make_blob_fixture(std::uint64_t seed = kBlobSeed);

// Reorders a fixture so the first 20 comments follow the given blob sequence.
BlobFixture reorder_blob_fixture(const BlobFixture& f, const std::vector<std::size_t>& leading);

// Dominance head: 13 of the first 20 comments from blob 1, 6 from blob 0, 1 from blob 2.
std::vector<std::size_t> dominance_head();

// Review-like texts built from the default lexicon vocabulary, with commas,
// quotes and multi-sentence bodies.
std::vector<std::string> make_review_texts(std::size_t n, std::uint64_t seed);

std::string csv_quote(const std::string& field);
// `id,content` CSV, one row per text.
std::string to_csv(const std::vector<std::string>& texts);
void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace fixtures
