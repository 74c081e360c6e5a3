#include "fixtures.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace fixtures {

namespace {

std::string format_offset(long micro) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s0.%06ld", micro < 0 ? "-" : "", std::labs(micro));
    return buf;
}

std::string mark_token(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "mark%02zu", i);
    return buf;
}

}  // namespace

BlobFixture make_blob_fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BlobFixture f;
    f.lexicon_tsv = "upbeat\t0.8\t1.0\ndownbeat\t-0.8\t1.0\n";
    const std::array<const char*, 3> anchors = {"Downbeat stuff. ", "", "Upbeat stuff. "};
    const long half_spread_micro = std::lround(kBlobSpread / 2 * 1e6);
    std::size_t index = 0;
    for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t k = 0; k < kBlobSizes[b]; ++k, ++index) {
            const long micro = std::lround(uniform(rng, -1.0, 1.0) * static_cast<double>(half_spread_micro));
            const std::string token = mark_token(index);
            f.lexicon_tsv += token + "\t" + format_offset(micro) + "\t0.5\n";
            f.texts.push_back(std::string(anchors[b]) + "Batch " + token + " noted.");
            const long anchor_micro = (static_cast<long>(b) - 1) * std::lround(kBlobSeparation * 1e6);
            f.totals.push_back(static_cast<double>((anchor_micro + micro) * 1000) / 1e9);
            f.blob.push_back(b);
        }
    }
    return f;
}

std::vector<std::size_t> dominance_head() {
    // 1 = dominant blob, 0 = runner-up, 2 = a single stray.
    return {1, 0, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 2, 0, 1, 1, 0, 0, 1, 0};
}

BlobFixture reorder_blob_fixture(const BlobFixture& f, const std::vector<std::size_t>& leading) {
    std::vector<bool> used(f.texts.size(), false);
    std::vector<std::size_t> order;
    for (const std::size_t b : leading) {
        bool found = false;
        for (std::size_t i = 0; i < f.texts.size(); ++i) {
            if (!used[i] && f.blob[i] == b) {
                used[i] = true;
                order.push_back(i);
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("blob exhausted while reordering");
    }
    for (std::size_t i = 0; i < f.texts.size(); ++i)
        if (!used[i]) order.push_back(i);

    BlobFixture out;
    out.lexicon_tsv = f.lexicon_tsv;
    for (const std::size_t i : order) {
        out.texts.push_back(f.texts[i]);
        out.totals.push_back(f.totals[i]);
        out.blob.push_back(f.blob[i]);
    }
    return out;
}

std::vector<std::string> make_review_texts(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> nouns = {
        "taffy", "coffee", "sauce", "dog food", "chips", "tea", "cereal", "candy", "box",
        "shipment", "flavor", "price", "bag", "snack", "product"};
    static const std::vector<std::string> positive = {
        "great", "good", "delicious", "tasty", "yummy", "fresh", "excellent", "nice", "perfect",
        "wonderful", "satisfying", "healthy", "flavorful", "amazing", "pleasant"};
    static const std::vector<std::string> negative = {
        "bad", "terrible", "stale", "bland", "greasy", "awful", "disappointing", "expensive",
        "salty", "soggy", "mediocre", "gross", "boring", "damaged", "tasteless"};
    static const std::vector<std::string> modifiers = {"", "", "", "very ", "really ", "not ",
                                                       "extremely ", "so ", "never "};
    static const std::vector<std::string> neutral = {
        "It arrived on Tuesday", "I ordered two bags", "My kids tried it, and so did I",
        "We keep it in the pantry", "The package says \"gluten free\"", "Shipping took a week"};

    std::mt19937_64 rng(seed);
    auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
        return v[static_cast<std::size_t>(rng() % v.size())];
    };
    std::vector<std::string> texts;
    texts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t sentences = 1 + static_cast<std::size_t>(rng() % 5);
        const double lean = unit(rng);  // share of positive sentences
        std::string text;
        for (std::size_t s = 0; s < sentences; ++s) {
            if (!text.empty()) text += ' ';
            const double roll = unit(rng);
            if (roll < 0.2) {
                text += pick(neutral) + ".";
            } else {
                const auto& adj = unit(rng) < lean ? pick(positive) : pick(negative);
                text += "The " + pick(nouns) + " was " + pick(modifiers) + adj +
                        (unit(rng) < 0.3 ? "!" : ".");
            }
        }
        texts.push_back(std::move(text));
    }
    return texts;
}

std::string csv_quote(const std::string& field) {
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const std::vector<std::string>& texts) {
    std::string out = "id,content\n";
    for (std::size_t i = 0; i < texts.size(); ++i) {
        out += std::to_string(i) + "," + csv_quote(texts[i]) + "\n";
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << contents;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_dir(const std::string& tag) {
    static std::size_t counter = 0;
    const auto base = std::filesystem::temp_directory_path() /
                      ("peakspam_" + tag + "_" + std::to_string(::getpid()) + "_" +
                       std::to_string(counter++));
    std::filesystem::remove_all(base);
    std::filesystem::create_directories(base);
    return base;
}

}  // namespace fixtures
