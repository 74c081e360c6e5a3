#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace peakspam {

// One review. Ids are dense and follow input order.
struct Comment {
    std::size_t id = 0;
    std::string text;
    std::vector<std::string> sentences;
};

enum class CorpusFormat { csv, jsonl };

// Parses "csv" / "jsonl"; throws ParamError otherwise.
CorpusFormat parse_corpus_format(std::string_view name);
// ".jsonl" / ".ndjson" map to jsonl, everything else to csv.
CorpusFormat corpus_format_from_path(const std::filesystem::path& path);

/// Loads a review corpus. CSV input must have a header row with a `content`
/// column (RFC 4180 quoting); JSONL input needs a string `content` key on
/// every line. Text is kept verbatim and split into sentences.
///
/// Throws IoError (unreadable file, invalid UTF-8), SchemaError (missing
/// column/key, malformed row) or EmptyCorpusError (no data rows).
std::vector<Comment> load_comments(const std::filesystem::path& path, CorpusFormat format);

// Same as load_comments but over in-memory file contents.
std::vector<Comment> parse_comments(std::string_view contents, CorpusFormat format);

// Splits after '.', '!' or '?' when followed by whitespace or end of text.
// Segments are trimmed and empty ones dropped.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercased ASCII-alphanumeric runs (non-ASCII bytes count as word
// characters). An apostrophe between two word characters stays inside the
// token; U+2019 is normalized to '\''.
std::vector<std::string> tokenize(std::string_view sentence);

bool is_valid_utf8(std::string_view bytes);

}  // namespace peakspam
