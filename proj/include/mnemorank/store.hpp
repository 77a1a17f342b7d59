#pragma once

#include "mnemorank/rank.hpp"
#include "mnemorank/trace.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mnemorank {

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL) noexcept;

// Hash of the mnemonic sequence only; labels and sample id do not enter.
std::uint64_t content_hash(const MnemonicTrace& trace) noexcept;

// 16 hex digits identifying (trace content, rank parameters).
std::string rank_cache_key(const MnemonicTrace& trace, const RankParams& params);

// One line: sample id, variant, d, converged, iterations, then token=value
// pairs. Values use 17 significant digits so a read reproduces them exactly.
void write_rank_vector(std::ostream& out, std::string_view sample_id, const RankVector& ranks);
RankVector read_rank_vector(std::string_view line, std::string* sample_id = nullptr);

// Lines starting with '#' carry the config echo.
void write_rank_vectors(std::ostream& out, std::span<const MnemonicTrace> traces,
                        std::span<const RankVector> ranks, std::string_view config_echo = {});

// Directory of rank vectors keyed by rank_cache_key. Safe to share between
// threads; entries are written to a temporary file and renamed into place.
class RankCache {
public:
    explicit RankCache(std::filesystem::path directory);

    RankVector get_or_compute(const MnemonicTrace& trace, const RankParams& params);

    std::size_t hits() const noexcept { return hits_; }
    std::size_t misses() const noexcept { return misses_; }
    const std::filesystem::path& directory() const noexcept { return directory_; }

private:
    std::filesystem::path directory_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

// Parsed corpus written by `ingest`, so later stages skip trace parsing.
void save_corpus(const std::filesystem::path& path, std::span<const MnemonicTrace> traces);
std::vector<MnemonicTrace> load_saved_corpus(const std::filesystem::path& path);

} // namespace mnemorank
