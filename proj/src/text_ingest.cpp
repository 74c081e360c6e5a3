#include "peakspam/text_ingest.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "peakspam/errors.hpp"

namespace peakspam {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

enum class GlyphKind { word, apostrophe, separator };

struct Glyph {
    GlyphKind kind;
    std::size_t width;
};

// Classifies the character starting at byte i. Non-ASCII characters are word
// characters except NBSP and the General Punctuation block (dashes, quotes).
Glyph classify(std::string_view s, std::size_t i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == '\'') return {GlyphKind::apostrophe, 1};
    if (c < 0x80) return {is_ascii_alnum(c) ? GlyphKind::word : GlyphKind::separator, 1};
    if (s.substr(i, 3) == "\xE2\x80\x99") return {GlyphKind::apostrophe, 3};
    std::size_t width = 1;
    if ((c & 0xE0) == 0xC0) {
        width = 2;
    } else if ((c & 0xF0) == 0xE0) {
        width = 3;
    } else if ((c & 0xF8) == 0xF0) {
        width = 4;
    }
    width = std::min(width, s.size() - i);
    if (s.substr(i, 2) == "\xC2\xA0") return {GlyphKind::separator, width};
    if (c == 0xE2 && width == 3) {
        const auto c1 = static_cast<unsigned char>(s[i + 1]);
        if (c1 == 0x80 || c1 == 0x81) return {GlyphKind::separator, width};
    }
    return {GlyphKind::word, width};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    return s;
}

using Record = std::vector<std::string>;

// RFC 4180 reader. Accepts LF or CRLF line endings; a quoted field may span lines.
class CsvReader {
public:
    explicit CsvReader(std::string_view data) : data_(data) {}

    bool next(Record& record) {
        record.clear();
        if (pos_ >= data_.size()) return false;
        ++line_;
        std::string field;
        bool quoted = false;
        bool after_quote = false;
        while (pos_ < data_.size()) {
            const char c = data_[pos_++];
            if (quoted) {
                if (c == '"') {
                    if (pos_ < data_.size() && data_[pos_] == '"') {
                        field += '"';
                        ++pos_;
                    } else {
                        quoted = false;
                        after_quote = true;
                    }
                } else {
                    if (c == '\n') ++line_;
                    field += c;
                }
                continue;
            }
            if (c == ',') {
                record.push_back(std::move(field));
                field.clear();
                after_quote = false;
            } else if (c == '\n' || c == '\r') {
                if (c == '\r' && pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
                record.push_back(std::move(field));
                return true;
            } else if (c == '"' && field.empty() && !after_quote) {
                quoted = true;
            } else if (after_quote) {
                throw SchemaError("csv line " + std::to_string(line_) +
                                  ": unexpected character after closing quote");
            } else {
                field += c;
            }
        }
        if (quoted) {
            throw SchemaError("csv line " + std::to_string(line_) + ": unterminated quoted field");
        }
        record.push_back(std::move(field));
        return true;
    }

    std::size_t line() const { return line_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

bool is_blank_record(const Record& r) { return r.size() == 1 && r.front().empty(); }

std::vector<Comment> parse_csv(std::string_view data) {
    CsvReader reader(data);
    Record header;
    while (reader.next(header) && is_blank_record(header)) {
    }
    if (header.empty() || is_blank_record(header)) {
        throw SchemaError("csv input has no header row");
    }
    std::size_t column = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == "content") {
            column = i;
            break;
        }
    }
    if (column == header.size()) throw SchemaError("csv header has no `content` column");

    std::vector<Comment> comments;
    Record row;
    while (reader.next(row)) {
        if (is_blank_record(row)) continue;
        if (row.size() <= column) {
            throw SchemaError("csv line " + std::to_string(reader.line()) + ": expected at least " +
                              std::to_string(column + 1) + " fields");
        }
        Comment c;
        c.id = comments.size();
        c.text = std::move(row[column]);
        comments.push_back(std::move(c));
    }
    return comments;
}

std::vector<Comment> parse_jsonl(std::string_view data) {
    std::vector<Comment> comments;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < data.size()) {
        std::size_t end = data.find('\n', start);
        if (end == std::string_view::npos) end = data.size();
        const std::string_view line = trim(data.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;

        nlohmann::json object;
        try {
            object = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw SchemaError("jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!object.is_object()) {
            throw SchemaError("jsonl line " + std::to_string(line_no) + ": not a JSON object");
        }
        const auto it = object.find("content");
        if (it == object.end() || !it->is_string()) {
            throw SchemaError("jsonl line " + std::to_string(line_no) +
                              ": missing string key `content`");
        }
        Comment c;
        c.id = comments.size();
        c.text = it->get<std::string>();
        comments.push_back(std::move(c));
    }
    return comments;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "csv") return CorpusFormat::csv;
    if (name == "jsonl") return CorpusFormat::jsonl;
    throw ParamError("unknown corpus format '" + std::string(name) + "'");
}

CorpusFormat corpus_format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".ndjson") ? CorpusFormat::jsonl : CorpusFormat::csv;
}

bool is_valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        const auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= bytes.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Reject overlong forms, surrogates and out-of-range code points.
        static constexpr std::uint32_t min_cp[] = {0, 0x80, 0x800, 0x10000};
        if (cp < min_cp[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += extra + 1;
    }
    return true;
}

std::vector<Comment> parse_comments(std::string_view contents, CorpusFormat format) {
    if (!is_valid_utf8(contents)) throw IoError("input is not valid UTF-8");
    contents = strip_bom(contents);
    auto comments = format == CorpusFormat::csv ? parse_csv(contents) : parse_jsonl(contents);
    if (comments.empty()) throw EmptyCorpusError("corpus has no data rows");
    for (auto& c : comments) c.sentences = split_sentences(c.text);
    return comments;
}

std::vector<Comment> load_comments(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("failed reading " + path.string());
    return parse_comments(contents, format);
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        if (i + 1 < text.size() && !is_space(text[i + 1])) continue;
        const auto piece = trim(text.substr(start, i + 1 - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = i + 1;
    }
    if (start < text.size()) {
        const auto piece = trim(text.substr(start));
        if (!piece.empty()) out.emplace_back(piece);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    std::size_t i = 0;
    while (i < sentence.size()) {
        const Glyph g = classify(sentence, i);
        if (g.kind == GlyphKind::apostrophe) {
            const bool inside = !current.empty() && i + g.width < sentence.size() &&
                                classify(sentence, i + g.width).kind == GlyphKind::word;
            if (inside) {
                current += '\'';
            } else {
                flush();
            }
        } else if (g.kind == GlyphKind::word) {
            for (std::size_t k = 0; k < g.width; ++k) {
                const char c = sentence[i + k];
                current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
            }
        } else {
            flush();
        }
        i += g.width;
    }
    flush();
    return tokens;
}

}  // namespace peakspam
