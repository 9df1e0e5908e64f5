#ifndef P300SNR_HARNESS_HPP
#define P300SNR_HARNESS_HPP

#include <string>
#include <vector>

#include "p300snr/lda.hpp"
#include "p300snr/snr.hpp"

namespace p300snr {

// Empirical symbol selection accuracy as a function of cycle count,
// averaged over repeated random train/test splits.
struct AccuracyCurve {
    struct Point {
        int n = 0;
        double accuracy = 0.0;
        double se = 0.0;  // between-repetition std / sqrt(n_reps)
    };
    std::vector<Point> points;  // n contiguous from 1 to cycles_per_symbol
    int n_train = 0;
    int n_reps = 0;
};

// Records the train/test symbol split of every repetition so tests can audit
// that no symbol ever straddles the split.
struct SplitAudit {
    std::vector<std::vector<int>> train_symbols;
    std::vector<std::vector<int>> test_symbols;
};

// Validation protocol: per repetition, train an LDA on all trials of n_train
// randomly chosen symbols and evaluate symbol detection on every held-out
// symbol for every n in {1..cycles}. Trials of one symbol never straddle the
// split. Evaluation uses the first n cycles of each symbol.
AccuracyCurve accuracy_vs_repetitions(const SessionData& session, int n_train, int n_reps,
                                      const ShrinkagePolicy& policy, Rng& rng,
                                      SplitAudit* audit = nullptr);

struct FitResult {
    double gamma_fit = 0.0;
    double sse = 0.0;
};

// Least-squares fit of the single-trial SNR to an empirical curve: coarse
// grid over gamma in [0, 5] (step 0.01), then golden-section refinement.
FitResult fit_gamma(const AccuracyCurve& curve, const SpellerGeometry& geometry,
                    const QuadratureConfig& quad = {});

struct RegressionStats {
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
    double p_value = 1.0;
};

// Ordinary least squares with the two-sided p-value of the slope's
// t statistic (n-2 degrees of freedom).
RegressionStats linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct SubsetRanking {
    struct Entry {
        std::vector<int> electrodes;  // kept block indices, ascending
        double empirical_snr = 0.0;
        std::vector<std::pair<int, double>> accuracy_by_n;  // (n, validation accuracy)
    };
    std::vector<Entry> entries;  // one per subset, lexicographic subset order
};

struct RankTimings {
    double snr_seconds = 0.0;
    double validation_seconds = 0.0;
};

// Brute-force electrode selection: for every keep-sized subset of the
// electrode blocks, the empirical SNR from a single fit on all data and the
// validation accuracy at the requested cycle counts. Each subset runs on its
// own RNG substream, so results do not depend on evaluation order.
SubsetRanking rank_electrode_subsets(const SessionData& session, int electrode_count, int keep,
                                     const std::vector<int>& n_values, const ShrinkagePolicy& policy,
                                     int n_train, int n_reps, Rng& rng, RankTimings* timings = nullptr);

// Fig-5-style comparison: per session, the empirical SNR and the three
// proxies against validation accuracy at a fixed cycle count, plus one
// regression of accuracy on each candidate predictor.
struct ProxyComparison {
    struct Row {
        double empirical_snr = 0.0;
        double peak_to_peak_v1 = 0.0;
        double peak_to_peak_v2 = 0.0;
        double area_under_curve = 0.0;
        double accuracy = 0.0;
    };
    std::vector<Row> rows;
    RegressionStats snr_regression;
    RegressionStats ptp_v1_regression;
    RegressionStats ptp_v2_regression;
    RegressionStats auc_regression;
    int fixed_n = 3;
};

ProxyComparison proxy_accuracy_comparison(const std::vector<SessionData>& sessions, int fixed_n,
                                          int n_train, int n_reps, const ShrinkagePolicy& policy,
                                          Rng& rng);

// CSV emission. Headers are fixed:
//   curve:   n,accuracy,se,predicted
//   ranking: subset,empirical_snr,snr_sqrtn_n<k>...,accuracy_n<k>...
//   proxies: session,empirical_snr,peak_to_peak_v1,peak_to_peak_v2,area_under_curve,accuracy
void write_curve_csv(const std::string& path, const AccuracyCurve& curve, const FitResult& fit,
                     const SpellerGeometry& geometry, const QuadratureConfig& quad = {});
void write_ranking_csv(const std::string& path, const SubsetRanking& ranking);
void write_proxy_csv(const std::string& path, const ProxyComparison& comparison);

}  // namespace p300snr

#endif
