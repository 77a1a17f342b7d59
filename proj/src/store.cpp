#include "mnemorank/store.hpp"

#include "mnemorank/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace mnemorank {
namespace {

constexpr std::string_view kCorpusMagic = "mnemorank-corpus 1";

std::string exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view s, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        fail(ErrorCode::InvalidArgument, std::string("malformed ") + what + " '" + std::string(s) + "'");
    }
    return value;
}

} // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t state) noexcept {
    for (unsigned char c : bytes) {
        state ^= c;
        state *= 0x100000001b3ULL;
    }
    return state;
}

std::uint64_t content_hash(const MnemonicTrace& trace) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& m : trace.mnemonics) {
        h = fnv1a(m, h);
        h = fnv1a("\n", h);
    }
    return h;
}

std::string rank_cache_key(const MnemonicTrace& trace, const RankParams& params) {
    std::ostringstream p;
    p << to_string(params.algorithm) << ' ' << exact(params.d) << ' ' << exact(params.epsilon) << ' '
      << params.max_iters;
    const std::uint64_t h = fnv1a(p.str(), content_hash(trace));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_rank_vector(std::ostream& out, std::string_view sample_id, const RankVector& ranks) {
    out << sample_id << '\t' << to_string(ranks.algorithm) << '\t' << exact(ranks.d) << '\t'
        << (ranks.converged ? 1 : 0) << '\t' << ranks.iterations_used;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        out << '\t' << ranks.tokens[i] << '=' << exact(ranks.values[i]);
    }
    out << '\n';
}

RankVector read_rank_vector(std::string_view line, std::string* sample_id) {
    if (!line.empty() && line.back() == '\n') {
        line.remove_suffix(1);
    }
    const auto fields = split(line, '\t');
    if (fields.size() < 5) {
        fail(ErrorCode::InvalidArgument, "rank vector line has too few fields");
    }
    RankVector rv;
    if (sample_id) {
        *sample_id = std::string(fields[0]);
    }
    auto algorithm = parse_algorithm(fields[1]);
    if (!algorithm) {
        fail(ErrorCode::InvalidArgument, "unknown rank variant '" + std::string(fields[1]) + "'");
    }
    rv.algorithm = *algorithm;
    rv.d = parse_number<double>(fields[2], "damping factor");
    rv.converged = fields[3] == "1";
    rv.iterations_used = parse_number<std::size_t>(fields[4], "iteration count");
    for (std::size_t i = 5; i < fields.size(); ++i) {
        const auto eq = fields[i].rfind('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCode::InvalidArgument, "rank entry lacks '='");
        }
        rv.tokens.emplace_back(fields[i].substr(0, eq));
        rv.values.push_back(parse_number<double>(fields[i].substr(eq + 1), "rank value"));
    }
    return rv;
}

void write_rank_vectors(std::ostream& out, std::span<const MnemonicTrace> traces,
                        std::span<const RankVector> ranks, std::string_view config_echo) {
    if (traces.size() != ranks.size()) {
        fail(ErrorCode::DimensionMismatch, "one rank vector per trace is required");
    }
    std::istringstream echo{std::string(config_echo)};
    for (std::string line; std::getline(echo, line);) {
        out << "# " << line << '\n';
    }
    for (std::size_t i = 0; i < traces.size(); ++i) {
        write_rank_vector(out, traces[i].sample_id, ranks[i]);
    }
}

RankCache::RankCache(std::filesystem::path directory) : directory_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot create cache directory " + directory_.string() + ": " + ec.message());
    }
}

RankVector RankCache::get_or_compute(const MnemonicTrace& trace, const RankParams& params) {
    const auto path = directory_ / (rank_cache_key(trace, params) + ".rank");
    if (std::ifstream in(path); in) {
        std::string line;
        if (std::getline(in, line)) {
            try {
                RankVector rv = read_rank_vector(line);
                if (rv.algorithm == params.algorithm && rv.d == params.d) {
                    ++hits_;
                    return rv;
                }
            } catch (const Error&) {
                // Unreadable entry: recompute and overwrite.
            }
        }
    }
    ++misses_;
    RankVector rv = rank_iterative(build_graph(trace, uses_self_loops(params.algorithm)), params);

    std::ostringstream tid;
    tid << std::this_thread::get_id();
    const auto tmp = path.string() + ".tmp" + tid.str();
    {
        std::ofstream out(tmp);
        if (!out) {
            fail(ErrorCode::Io, "cannot write cache entry " + tmp);
        }
        write_rank_vector(out, "-", rv);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot store cache entry " + path.string() + ": " + ec.message());
    }
    return rv;
}

void save_corpus(const std::filesystem::path& path, std::span<const MnemonicTrace> traces) {
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::Io, "cannot write corpus file " + path.string());
    }
    out << kCorpusMagic << '\n' << traces.size() << '\n';
    for (const auto& t : traces) {
        out << t.sample_id << '\t' << t.type_label.value_or("") << '\t' << t.family_label.value_or("") << '\t'
            << (t.truncated ? 1 : 0) << '\t' << t.skipped_lines << '\t' << t.mnemonics.size() << '\n';
        for (std::size_t i = 0; i < t.mnemonics.size(); ++i) {
            out << (i ? " " : "") << t.mnemonics[i];
        }
        out << '\n';
    }
    if (!out) {
        fail(ErrorCode::Io, "error writing corpus file " + path.string());
    }
}

std::vector<MnemonicTrace> load_saved_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::Io, "cannot open corpus file " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kCorpusMagic) {
        fail(ErrorCode::InvalidArgument, path.string() + " is not a saved corpus");
    }
    std::getline(in, line);
    const auto count = parse_number<std::size_t>(line, "sample count");
    if (count == 0) {
        fail(ErrorCode::EmptyCorpus, "saved corpus has no samples");
    }
    std::vector<MnemonicTrace> traces(count);
    for (auto& t : traces) {
        if (!std::getline(in, line)) {
            fail(ErrorCode::InvalidArgument, "saved corpus is truncated");
        }
        const auto f = split(line, '\t');
        if (f.size() != 6) {
            fail(ErrorCode::InvalidArgument, "malformed sample header in saved corpus");
        }
        t.sample_id = std::string(f[0]);
        if (!f[1].empty()) {
            t.type_label = std::string(f[1]);
        }
        if (!f[2].empty()) {
            t.family_label = std::string(f[2]);
        }
        t.truncated = f[3] == "1";
        t.skipped_lines = parse_number<std::size_t>(f[4], "skipped line count");
        const auto n = parse_number<std::size_t>(f[5], "mnemonic count");
        if (!std::getline(in, line)) {
            fail(ErrorCode::InvalidArgument, "saved corpus is truncated");
        }
        t.mnemonics.reserve(n);
        for (auto tok : split(line, ' ')) {
            if (!tok.empty()) {
                t.mnemonics.emplace_back(tok);
            }
        }
        if (t.mnemonics.size() != n) {
            fail(ErrorCode::InvalidArgument, "mnemonic count mismatch for sample '" + t.sample_id + "'");
        }
    }
    return traces;
}

} // namespace mnemorank
