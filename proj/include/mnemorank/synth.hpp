#pragma once

#include "mnemorank/random.hpp"
#include "mnemorank/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mnemorank {

struct SynthSpec {
    std::size_t n_families = 3;
    std::size_t samples_per_family = 200;
    std::size_t trace_length = 10'000;
    std::size_t alphabet_size = 30;
    // Added to each diagonal entry of a family's transition matrix before the
    // row is renormalised.
    double self_loop_bias = 0.0;
    // Probability that a step jumps to a uniformly random mnemonic.
    double noise = 0.05;
    std::uint64_t seed = 7;
    // Family f belongs to type floor(f / families_per_type).
    std::size_t families_per_type = 2;
    // Families 2j and 2j+1 share one transition matrix; only the odd member
    // receives self_loop_bias. Isolates self-visit information as the only
    // difference within a pair.
    bool paired_self_loops = false;
};

void validate(const SynthSpec& spec);

// Row-stochastic, row-major alphabet_size x alphabet_size.
using TransitionMatrix = std::vector<double>;

struct SynthCorpus {
    std::vector<std::string> alphabet;
    std::vector<TransitionMatrix> family_matrices;
    CorpusManifest manifest;  // trace paths relative to the output directory
    std::vector<MnemonicTrace> traces;
};

// Mnemonic names for an alphabet of the given size: common x86 mnemonics
// first, then "op<N>".
std::vector<std::string> synthetic_alphabet(std::size_t size);

std::string family_name(std::size_t family);
std::string type_name(std::size_t type);

std::vector<TransitionMatrix> family_matrices(const SynthSpec& spec);

// Walks `matrix` from a uniformly random start state.
std::vector<std::string> walk_chain(const TransitionMatrix& matrix, std::span<const std::string> alphabet,
                                    std::size_t length, double noise, Rng& rng);

SynthCorpus generate(const SynthSpec& spec, unsigned threads = 1);

// Writes <dir>/manifest.csv and one trace file per sample under <dir>/traces.
// Returns the manifest path.
std::filesystem::path write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

} // namespace mnemorank
