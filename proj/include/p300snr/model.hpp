#ifndef P300SNR_MODEL_HPP
#define P300SNR_MODEL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "p300snr/accuracy.hpp"
#include "p300snr/linalg.hpp"
#include "p300snr/rng.hpp"

namespace p300snr {

// Ground-truth generative model: a trial is mu_y + z with z ~ N(0, Sigma),
// y = 1 when the flashed stimulus contains the target. The lower Cholesky
// factor of Sigma is cached at construction.
struct GaussianP300Model {
    Vector mu0;
    Vector mu1;
    Matrix sigma;
    CholeskyFactor chol;

    std::size_t dim() const { return mu0.size(); }
};

GaussianP300Model build_model(Vector mu0, Vector mu1, Matrix sigma);

// Single-trial SNR gamma = sqrt((mu1-mu0)^T Sigma^-1 (mu1-mu0)),
// via triangular solves against the cached factor.
double theoretical_snr(const GaussianP300Model& model);

Vector sample_trial(const GaussianP300Model& model, bool is_target, Rng& rng);

enum class CovarianceStructure { identity, ar1 };

// Test-fixture factory: random mean-difference direction rescaled so the
// theoretical SNR equals gamma exactly. ar1 uses sigma_ij = rho^|i-j|.
GaussianP300Model make_synthetic_model(std::size_t dim, double gamma, CovarianceStructure structure,
                                       double rho, Rng& rng);

// Speller session layout. stimulus_id runs over rows first, then columns:
// ids [0, n_rows) flash rows, ids [n_rows, n_rows+n_cols) flash columns.
struct SessionConfig {
    SpellerGeometry geometry;
    int cycles_per_symbol = 15;
    std::vector<std::pair<int, int>> symbols;  // (target row, target col)
    std::uint64_t rng_seed = 0;

    void validate() const;
    int stimuli_per_cycle() const { return geometry.n_rows + geometry.n_cols; }
};

struct Trial {
    Vector features;
    int label = 0;  // 1 iff stimulus_id matches the target row or column
    int stimulus_id = 0;
    int cycle_index = 0;
    int symbol_index = 0;
};

struct SessionData {
    SessionConfig config;
    std::vector<Trial> trials;  // presentation order
};

// For each symbol and cycle, flashes every stimulus exactly once in a fresh
// uniformly random order. One RNG substream per symbol (key = symbol index),
// so identical seeds give bit-identical sessions.
SessionData simulate_session(const GaussianP300Model& model, const SessionConfig& config);

// Keeps only the listed electrode blocks of every feature vector, assuming
// electrode-major concatenation of `electrode_count` equal blocks.
SessionData slice_electrode_blocks(const SessionData& session, int electrode_count,
                                   const std::vector<int>& keep);

}  // namespace p300snr

#endif
