#include "mnemorank/trace.hpp"

#include "mnemorank/error.hpp"
#include "mnemorank/parallel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace mnemorank {
namespace {

constexpr std::array<std::string_view, 6> kPrefixes = {"lock", "rep", "repe", "repz", "repne", "repnz"};

bool is_space(char c) noexcept { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Next whitespace-delimited token starting at pos; empty at end of line.
std::string_view next_token(std::string_view line, std::size_t& pos) {
    while (pos < line.size() && is_space(line[pos])) {
        ++pos;
    }
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) {
        ++pos;
    }
    return line.substr(start, pos - start);
}

bool is_comment(std::string_view token) noexcept {
    return token.starts_with(';') || token.starts_with('#') || token.starts_with("//");
}

bool is_mnemonic_char(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) {
        ++b;
    }
    while (e > b && is_space(s[e - 1])) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

// Splits one manifest line on commas, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(trim(field));
    return fields;
}

class TraceBuilder {
public:
    TraceBuilder(std::string sample_id, std::size_t cap) : cap_(cap) {
        if (cap == 0) {
            fail(ErrorCode::InvalidArgument, "trace cap must be at least 1");
        }
        trace_.sample_id = std::move(sample_id);
    }

    // Returns false once the cap has been exceeded and no more lines are needed.
    bool feed(std::string_view line) {
        auto mnemonic = extract_mnemonic(line);
        if (!mnemonic) {
            ++trace_.skipped_lines;
            return true;
        }
        if (trace_.mnemonics.size() == cap_) {
            trace_.truncated = true;
            return false;
        }
        trace_.mnemonics.push_back(std::move(*mnemonic));
        return true;
    }

    MnemonicTrace finish() && {
        if (trace_.mnemonics.empty()) {
            fail(ErrorCode::EmptyTrace, "sample '" + trace_.sample_id + "' has no instructions");
        }
        return std::move(trace_);
    }

private:
    std::size_t cap_;
    MnemonicTrace trace_;
};

} // namespace

bool is_instruction_prefix(std::string_view token) noexcept {
    return std::find(kPrefixes.begin(), kPrefixes.end(), token) != kPrefixes.end();
}

std::optional<std::string> extract_mnemonic(std::string_view instruction_line) {
    std::string lowered(instruction_line);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    std::size_t pos = 0;
    for (;;) {
        std::string_view token = next_token(lowered, pos);
        if (token.empty() || is_comment(token)) {
            return std::nullopt;
        }
        while (!token.empty() && !is_mnemonic_char(token.back())) {
            token.remove_suffix(1);
        }
        if (is_instruction_prefix(token)) {
            continue;
        }
        if (token.empty() || !std::all_of(token.begin(), token.end(), is_mnemonic_char) ||
            !(token.front() >= 'a' && token.front() <= 'z')) {
            return std::nullopt;
        }
        return std::string(token);
    }
}

MnemonicTrace parse_trace(std::span<const std::string> lines, std::string sample_id,
                          std::size_t cap) {
    TraceBuilder builder(std::move(sample_id), cap);
    for (const auto& line : lines) {
        if (!builder.feed(line)) {
            break;
        }
    }
    return std::move(builder).finish();
}

MnemonicTrace parse_trace(std::istream& in, std::string sample_id, std::size_t cap) {
    TraceBuilder builder(std::move(sample_id), cap);
    std::string line;
    while (std::getline(in, line)) {
        if (!builder.feed(line)) {
            break;
        }
    }
    return std::move(builder).finish();
}

MnemonicTrace read_trace_file(const std::filesystem::path& path, std::string sample_id,
                              std::size_t cap) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::Io, "cannot open trace file " + path.string());
    }
    return parse_trace(in, std::move(sample_id), cap);
}

CorpusManifest parse_manifest(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) {
            line.erase(0, 3);
        }
        if (!trim(line).empty()) {
            header = split_csv_line(line);
        }
    }
    if (header.empty()) {
        fail(ErrorCode::EmptyManifest, "manifest has no header");
    }

    auto column = [&](std::string_view name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            fail(ErrorCode::MissingColumn, "manifest header lacks column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t id_col = column("sample_id");
    const std::size_t path_col = column("trace_path");
    const std::size_t type_col = column("type");
    const std::size_t family_col = column("family");

    CorpusManifest manifest;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            fail(ErrorCode::MissingColumn, "manifest line " + std::to_string(line_no) + " has " +
                                               std::to_string(fields.size()) + " fields, expected " +
                                               std::to_string(header.size()));
        }
        ManifestEntry entry{fields[id_col], fields[path_col], fields[type_col], fields[family_col]};
        if (entry.sample_id.empty() || entry.trace_path.empty() || entry.type_label.empty() ||
            entry.family_label.empty()) {
            fail(ErrorCode::MissingColumn, "manifest line " + std::to_string(line_no) + " has an empty field");
        }
        if (!seen.insert(entry.sample_id).second) {
            fail(ErrorCode::DuplicateSampleId, "sample_id '" + entry.sample_id + "' appears more than once");
        }
        manifest.entries.push_back(std::move(entry));
    }
    if (manifest.entries.empty()) {
        fail(ErrorCode::EmptyManifest, "manifest has no samples");
    }
    return manifest;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::Io, "cannot open manifest " + path.string());
    }
    return parse_manifest(in);
}

std::filesystem::path resolve_trace_path(const std::filesystem::path& manifest_path,
                                         const ManifestEntry& entry) {
    std::filesystem::path trace(entry.trace_path);
    if (trace.is_absolute()) {
        return trace;
    }
    return manifest_path.parent_path() / trace;
}

std::vector<MnemonicTrace> load_corpus(const std::filesystem::path& manifest_path, std::size_t cap,
                                       unsigned threads) {
    const CorpusManifest manifest = load_manifest(manifest_path);
    std::vector<MnemonicTrace> traces(manifest.entries.size());
    parallel_for(traces.size(), threads, [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        traces[i] = read_trace_file(resolve_trace_path(manifest_path, entry), entry.sample_id, cap);
        traces[i].type_label = entry.type_label;
        traces[i].family_label = entry.family_label;
    });
    return traces;
}

void write_manifest(std::ostream& out, const CorpusManifest& manifest) {
    out << "sample_id,trace_path,type,family\n";
    for (const auto& e : manifest.entries) {
        out << e.sample_id << ',' << e.trace_path << ',' << e.type_label << ',' << e.family_label << '\n';
    }
}

} // namespace mnemorank
