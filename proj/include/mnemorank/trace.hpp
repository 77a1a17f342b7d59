#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemorank {

inline constexpr std::size_t kDefaultTraceCap = 5'000'000;

// Executed mnemonics of one sample, in execution order.
struct MnemonicTrace {
    std::string sample_id;
    std::vector<std::string> mnemonics;
    std::optional<std::string> family_label;
    std::optional<std::string> type_label;
    // True iff the source held more instruction lines than the cap.
    bool truncated = false;
    // Lines that produced no mnemonic (blank, comments, unparseable).
    std::size_t skipped_lines = 0;
};

struct ManifestEntry {
    std::string sample_id;
    std::string trace_path;
    std::string type_label;
    std::string family_label;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;
};

// Instruction prefixes that are never reported as the mnemonic.
bool is_instruction_prefix(std::string_view token) noexcept;

// Mnemonic of one trace line, or nullopt for blank, comment (';', '#', "//")
// and unparseable lines. Prefixes are skipped and operands discarded.
std::optional<std::string> extract_mnemonic(std::string_view instruction_line);

MnemonicTrace parse_trace(std::span<const std::string> lines, std::string sample_id,
                          std::size_t cap = kDefaultTraceCap);

// Streaming variant with the same rules; stops reading once the cap is
// exceeded.
MnemonicTrace parse_trace(std::istream& in, std::string sample_id,
                          std::size_t cap = kDefaultTraceCap);

MnemonicTrace read_trace_file(const std::filesystem::path& path, std::string sample_id,
                              std::size_t cap = kDefaultTraceCap);

// Header "sample_id,trace_path,type,family" (any column order). Relative
// trace paths are kept as written; see resolve_trace_path.
CorpusManifest parse_manifest(std::istream& in);
CorpusManifest load_manifest(const std::filesystem::path& path);

std::filesystem::path resolve_trace_path(const std::filesystem::path& manifest_path,
                                         const ManifestEntry& entry);

// Reads every trace named in the manifest and attaches its labels.
std::vector<MnemonicTrace> load_corpus(const std::filesystem::path& manifest_path,
                                       std::size_t cap = kDefaultTraceCap,
                                       unsigned threads = 1);

void write_manifest(std::ostream& out, const CorpusManifest& manifest);

} // namespace mnemorank
