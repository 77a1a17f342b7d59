#include "mnemorank/synth.hpp"

#include "mnemorank/error.hpp"
#include "mnemorank/parallel.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mnemorank {
namespace {

constexpr std::array<const char*, 40> kMnemonics = {
    "mov",  "push", "pop",  "add",   "sub",  "xor",  "and",  "or",   "cmp",  "test",
    "jmp",  "je",   "jne",  "jz",    "jnz",  "call", "ret",  "lea",  "inc",  "dec",
    "shl",  "shr",  "sar",  "imul",  "idiv", "movzx", "movsx", "nop", "leave", "not",
    "neg",  "xchg", "cdq",  "sete",  "setne", "jl",  "jg",   "jb",   "ja",   "stosd"};

} // namespace

void validate(const SynthSpec& spec) {
    if (spec.n_families < 2) {
        fail(ErrorCode::InvalidArgument, "at least two families are required");
    }
    if (spec.alphabet_size < 2) {
        fail(ErrorCode::InvalidArgument, "alphabet needs at least two mnemonics");
    }
    if (spec.samples_per_family < 1 || spec.trace_length < 1 || spec.families_per_type < 1) {
        fail(ErrorCode::InvalidArgument, "samples, trace length and families per type must be positive");
    }
    if (!(spec.self_loop_bias >= 0.0 && spec.self_loop_bias < 1.0)) {
        fail(ErrorCode::InvalidArgument, "self_loop_bias must lie in [0, 1)");
    }
    if (!(spec.noise >= 0.0 && spec.noise < 1.0)) {
        fail(ErrorCode::InvalidArgument, "noise must lie in [0, 1)");
    }
}

std::vector<std::string> synthetic_alphabet(std::size_t size) {
    std::vector<std::string> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        out.emplace_back(i < kMnemonics.size() ? std::string(kMnemonics[i]) : "op" + std::to_string(i));
    }
    return out;
}

std::string family_name(std::size_t family) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "family%02zu", family);
    return buf;
}

std::string type_name(std::size_t type) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "type%02zu", type);
    return buf;
}

std::vector<TransitionMatrix> family_matrices(const SynthSpec& spec) {
    validate(spec);
    const std::size_t a = spec.alphabet_size;
    std::vector<TransitionMatrix> out;
    out.reserve(spec.n_families);
    for (std::size_t f = 0; f < spec.n_families; ++f) {
        const std::size_t base = spec.paired_self_loops ? f / 2 : f;
        Rng rng = derive_stream(spec.seed, StreamDomain::SynthFamily, base);
        TransitionMatrix m(a * a);
        // Flat Dirichlet rows.
        for (double& x : m) {
            x = -std::log(uniform01_open_zero(rng));
        }
        const double bias = (!spec.paired_self_loops || f % 2 == 1) ? spec.self_loop_bias : 0.0;
        for (std::size_t r = 0; r < a; ++r) {
            double total = 0.0;
            for (std::size_t c = 0; c < a; ++c) {
                total += m[r * a + c];
            }
            for (std::size_t c = 0; c < a; ++c) {
                m[r * a + c] /= total;
            }
            m[r * a + r] += bias;
            for (std::size_t c = 0; c < a; ++c) {
                m[r * a + c] /= 1.0 + bias;
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::string> walk_chain(const TransitionMatrix& matrix, std::span<const std::string> alphabet,
                                    std::size_t length, double noise, Rng& rng) {
    const std::size_t a = alphabet.size();
    if (matrix.size() != a * a) {
        fail(ErrorCode::DimensionMismatch, "transition matrix does not match the alphabet");
    }
    std::vector<std::string> out;
    if (length == 0) {
        return out;
    }
    out.reserve(length);
    std::size_t state = uniform_index(rng, a);
    out.push_back(alphabet[state]);
    while (out.size() < length) {
        if (noise > 0.0 && uniform01(rng) < noise) {
            state = uniform_index(rng, a);
        } else {
            double u = uniform01(rng);
            std::size_t next = a - 1;
            for (std::size_t c = 0; c < a; ++c) {
                u -= matrix[state * a + c];
                if (u < 0.0) {
                    next = c;
                    break;
                }
            }
            // Rounding can leave u >= 0 after the last column; walk back to
            // the last reachable state.
            while (matrix[state * a + next] == 0.0 && next > 0) {
                --next;
            }
            state = next;
        }
        out.push_back(alphabet[state]);
    }
    return out;
}

SynthCorpus generate(const SynthSpec& spec, unsigned threads) {
    validate(spec);
    SynthCorpus corpus;
    corpus.alphabet = synthetic_alphabet(spec.alphabet_size);
    corpus.family_matrices = family_matrices(spec);

    const std::size_t total = spec.n_families * spec.samples_per_family;
    corpus.traces.resize(total);
    corpus.manifest.entries.resize(total);
    parallel_for(total, threads, [&](std::size_t i) {
        const std::size_t family = i / spec.samples_per_family;
        char id[48];
        std::snprintf(id, sizeof id, "%s_%04zu", family_name(family).c_str(), i % spec.samples_per_family);
        Rng rng = derive_stream(spec.seed, StreamDomain::SynthSample, i);

        MnemonicTrace& t = corpus.traces[i];
        t.sample_id = id;
        t.mnemonics = walk_chain(corpus.family_matrices[family], corpus.alphabet, spec.trace_length, spec.noise, rng);
        t.family_label = family_name(family);
        t.type_label = type_name(family / spec.families_per_type);
        corpus.manifest.entries[i] = {t.sample_id, "traces/" + t.sample_id + ".txt", *t.type_label, *t.family_label};
    });
    return corpus;
}

std::filesystem::path write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "traces", ec);
    if (ec) {
        fail(ErrorCode::Io, "cannot create " + (dir / "traces").string() + ": " + ec.message());
    }
    for (std::size_t i = 0; i < corpus.traces.size(); ++i) {
        const auto path = dir / corpus.manifest.entries[i].trace_path;
        std::ofstream out(path);
        if (!out) {
            fail(ErrorCode::Io, "cannot write " + path.string());
        }
        for (const auto& m : corpus.traces[i].mnemonics) {
            out << m << '\n';
        }
    }
    const auto manifest_path = dir / "manifest.csv";
    std::ofstream out(manifest_path);
    if (!out) {
        fail(ErrorCode::Io, "cannot write " + manifest_path.string());
    }
    write_manifest(out, corpus.manifest);
    return manifest_path;
}

} // namespace mnemorank
