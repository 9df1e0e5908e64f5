#ifndef P300SNR_LDA_HPP
#define P300SNR_LDA_HPP

#include <string>
#include <vector>

#include "p300snr/linalg.hpp"
#include "p300snr/model.hpp"

namespace p300snr {

// Ridge applied to the pooled covariance before solving for the weights:
// fixed uses lambda as given, relative uses lambda = eps * trace(Sigma)/D.
struct ShrinkagePolicy {
    enum class Kind { fixed, relative };
    Kind kind = Kind::relative;
    double value = 1e-6;

    static ShrinkagePolicy fixed(double lambda) { return {Kind::fixed, lambda}; }
    static ShrinkagePolicy relative(double eps) { return {Kind::relative, eps}; }
};

struct LdaEstimates {
    Vector mu0_hat;
    Vector mu1_hat;
    Matrix sigma_hat;  // pooled within-class ML covariance
    Vector weights;    // solves (sigma_hat + shrinkage*I) w = mu1_hat - mu0_hat
    double shrinkage = 0.0;  // the lambda actually applied
};

struct DetectionResult {
    int row = 0;
    int col = 0;
    Vector row_scores;
    Vector col_scores;
};

LdaEstimates fit_lda(const std::vector<const Trial*>& trials, const ShrinkagePolicy& policy = {});
LdaEstimates fit_lda(const std::vector<Trial>& trials, const ShrinkagePolicy& policy = {});

double score(const LdaEstimates& est, const Vector& x);

// All trials of one symbol, in presentation order.
using SymbolTrials = std::vector<const Trial*>;

// Groups a session's trials by symbol index. The per-call session scans in
// average_stimulus_signals / detect_symbol go through this too.
std::vector<SymbolTrials> index_session(const SessionData& session);

// Mean signal per stimulus_id over the first use_cycles cycles of the symbol.
std::vector<Vector> average_stimulus_signals(const SessionData& session, int symbol_index, int use_cycles);
std::vector<Vector> average_stimulus_signals(const SymbolTrials& trials, const SpellerGeometry& geometry,
                                             int cycles_per_symbol, int use_cycles);

// Scores every stimulus average and picks the best row and best column by
// argmax; ties break to the lowest stimulus index.
DetectionResult detect_symbol(const LdaEstimates& est, const SessionData& session, int symbol_index,
                              int use_cycles);
DetectionResult detect_symbol(const LdaEstimates& est, const SymbolTrials& trials,
                              const SpellerGeometry& geometry, int cycles_per_symbol, int use_cycles);

// LdaEstimates populated from the true model parameters (Bayes-optimal
// weights, zero shrinkage).
LdaEstimates oracle_weights(const GaussianP300Model& model);

// JSON artifact format; floats survive a save/load round trip exactly.
void save_lda(const LdaEstimates& est, const std::string& path);
LdaEstimates load_lda(const std::string& path);

}  // namespace p300snr

#endif
