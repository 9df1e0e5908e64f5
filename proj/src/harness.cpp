#include "p300snr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "p300snr/errors.hpp"
#include "p300snr/stats.hpp"

namespace p300snr {

namespace {

// Correctness of the detected symbol for every prefix cycle count 1..cycles.
// The classifier score is linear, so scoring per-trial and accumulating score
// sums per stimulus is identical to scoring the averaged signals (covered by
// a unit test against detect_symbol).
void detect_prefix_curve(const LdaEstimates& est, const SymbolTrials& trials,
                         const SpellerGeometry& geometry, int cycles, int target_row, int target_col,
                         std::vector<int>& correct_by_n) {
    const int stimuli = geometry.n_rows + geometry.n_cols;
    std::vector<double> score_by_cycle(static_cast<std::size_t>(cycles) * static_cast<std::size_t>(stimuli));
    std::vector<int> seen(score_by_cycle.size(), 0);
    for (const Trial* t : trials) {
        if (t->cycle_index < 0 || t->cycle_index >= cycles || t->stimulus_id < 0 || t->stimulus_id >= stimuli)
            throw data_error("trial indices outside the session layout");
        const std::size_t slot = static_cast<std::size_t>(t->cycle_index) * static_cast<std::size_t>(stimuli) +
                                 static_cast<std::size_t>(t->stimulus_id);
        if (seen[slot]++) throw data_error("duplicate trial for one stimulus within a cycle");
        score_by_cycle[slot] = score(est, t->features);
    }
    for (int v : seen)
        if (!v) throw data_error("symbol is missing a stimulus flash in some cycle");

    std::vector<double> sums(static_cast<std::size_t>(stimuli), 0.0);
    for (int cycle = 0; cycle < cycles; ++cycle) {
        for (int s = 0; s < stimuli; ++s)
            sums[static_cast<std::size_t>(s)] +=
                score_by_cycle[static_cast<std::size_t>(cycle) * static_cast<std::size_t>(stimuli) +
                               static_cast<std::size_t>(s)];
        int best_row = 0;
        for (int r = 1; r < geometry.n_rows; ++r)
            if (sums[static_cast<std::size_t>(r)] > sums[static_cast<std::size_t>(best_row)]) best_row = r;
        int best_col = 0;
        for (int c = 1; c < geometry.n_cols; ++c)
            if (sums[static_cast<std::size_t>(geometry.n_rows + c)] >
                sums[static_cast<std::size_t>(geometry.n_rows + best_col)])
                best_col = c;
        if (best_row == target_row && best_col == target_col)
            correct_by_n[static_cast<std::size_t>(cycle)]++;
    }
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

}  // namespace

AccuracyCurve accuracy_vs_repetitions(const SessionData& session, int n_train, int n_reps,
                                      const ShrinkagePolicy& policy, Rng& rng, SplitAudit* audit) {
    session.config.validate();
    const int n_symbols = static_cast<int>(session.config.symbols.size());
    if (n_train < 1 || n_reps < 1)
        throw std::invalid_argument("accuracy_vs_repetitions: n_train and n_reps must be positive");
    if (n_symbols <= n_train) {
        throw data_error("accuracy_vs_repetitions: need more than " + std::to_string(n_train) +
                         " symbols, session has " + std::to_string(n_symbols));
    }
    const int cycles = session.config.cycles_per_symbol;
    const auto by_symbol = index_session(session);

    std::vector<double> sum_acc(static_cast<std::size_t>(cycles), 0.0);
    std::vector<double> sum_acc_sq(static_cast<std::size_t>(cycles), 0.0);

    std::vector<const Trial*> train_trials;
    std::vector<int> correct(static_cast<std::size_t>(cycles));
    for (int rep = 0; rep < n_reps; ++rep) {
        const std::vector<int> perm = rng.permutation(n_symbols);
        train_trials.clear();
        for (int i = 0; i < n_train; ++i) {
            for (const Trial* t : by_symbol[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])])
                train_trials.push_back(t);
        }
        const LdaEstimates est = fit_lda(train_trials, policy);

        std::fill(correct.begin(), correct.end(), 0);
        const int n_test = n_symbols - n_train;
        for (int i = n_train; i < n_symbols; ++i) {
            const int sym = perm[static_cast<std::size_t>(i)];
            const auto [target_row, target_col] = session.config.symbols[static_cast<std::size_t>(sym)];
            detect_prefix_curve(est, by_symbol[static_cast<std::size_t>(sym)], session.config.geometry,
                                cycles, target_row, target_col, correct);
        }
        for (int n = 0; n < cycles; ++n) {
            const double acc = static_cast<double>(correct[static_cast<std::size_t>(n)]) / n_test;
            sum_acc[static_cast<std::size_t>(n)] += acc;
            sum_acc_sq[static_cast<std::size_t>(n)] += acc * acc;
        }
        if (audit) {
            audit->train_symbols.emplace_back(perm.begin(), perm.begin() + n_train);
            audit->test_symbols.emplace_back(perm.begin() + n_train, perm.end());
        }
    }

    AccuracyCurve curve;
    curve.n_train = n_train;
    curve.n_reps = n_reps;
    curve.points.resize(static_cast<std::size_t>(cycles));
    for (int n = 0; n < cycles; ++n) {
        auto& point = curve.points[static_cast<std::size_t>(n)];
        point.n = n + 1;
        const double mean = sum_acc[static_cast<std::size_t>(n)] / n_reps;
        point.accuracy = mean;
        if (n_reps > 1) {
            const double var =
                std::max(0.0, (sum_acc_sq[static_cast<std::size_t>(n)] - n_reps * mean * mean) / (n_reps - 1));
            point.se = std::sqrt(var / n_reps);
        }
    }
    return curve;
}

namespace {

double curve_sse(const AccuracyCurve& curve, const SpellerGeometry& geometry, const QuadratureConfig& quad,
                 double gamma) {
    double sse = 0.0;
    for (const auto& point : curve.points) {
        const double resid = point.accuracy - symbol_accuracy(geometry, point.n, gamma, quad);
        sse += resid * resid;
    }
    return sse;
}

}  // namespace

FitResult fit_gamma(const AccuracyCurve& curve, const SpellerGeometry& geometry, const QuadratureConfig& quad) {
    if (curve.points.empty()) throw std::invalid_argument("fit_gamma: empty curve");
    constexpr double kGridStep = 0.01;
    constexpr double kGridMax = 5.0;

    double best_gamma = 0.0;
    double best_sse = curve_sse(curve, geometry, quad, 0.0);
    for (double g = kGridStep; g <= kGridMax + 1e-12; g += kGridStep) {
        const double sse = curve_sse(curve, geometry, quad, g);
        if (sse < best_sse) {
            best_sse = sse;
            best_gamma = g;
        }
    }

    // Golden-section refinement within one grid step of the coarse argmin.
    double lo = std::max(0.0, best_gamma - kGridStep);
    double hi = std::min(kGridMax, best_gamma + kGridStep);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = curve_sse(curve, geometry, quad, c);
    double fd = curve_sse(curve, geometry, quad, d);
    while (hi - lo > 1e-6) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = curve_sse(curve, geometry, quad, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = curve_sse(curve, geometry, quad, d);
        }
    }
    FitResult fit;
    fit.gamma_fit = 0.5 * (lo + hi);
    fit.sse = curve_sse(curve, geometry, quad, fit.gamma_fit);
    if (best_sse < fit.sse) {
        fit.gamma_fit = best_gamma;
        fit.sse = best_sse;
    }
    return fit;
}

RegressionStats linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw std::invalid_argument("linear_fit: size mismatch");
    if (n < 3) throw data_error("linear_fit: need at least 3 points");
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0) throw data_error("linear_fit: xs are degenerate (all equal)");

    RegressionStats stats;
    stats.slope = sxy / sxx;
    stats.intercept = mean_y - stats.slope * mean_x;
    if (syy <= 0.0) {
        stats.pearson_r = 0.0;
        stats.p_value = 1.0;
        return stats;
    }
    stats.pearson_r = sxy / std::sqrt(sxx * syy);
    stats.pearson_r = std::clamp(stats.pearson_r, -1.0, 1.0);
    const double df = static_cast<double>(n) - 2.0;
    const double denom = 1.0 - stats.pearson_r * stats.pearson_r;
    double t;
    if (denom <= 0.0) {
        t = std::numeric_limits<double>::infinity();
    } else {
        t = stats.pearson_r * std::sqrt(df / denom);
    }
    stats.p_value = student_t_two_sided_p(t, df);
    return stats;
}

namespace {

std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
    for (;;) {
        out.push_back(current);
        int i = k - 1;
        while (i >= 0 && current[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++current[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

std::vector<const Trial*> all_trials(const SessionData& session) {
    std::vector<const Trial*> out;
    out.reserve(session.trials.size());
    for (const Trial& t : session.trials) out.push_back(&t);
    return out;
}

}  // namespace

SubsetRanking rank_electrode_subsets(const SessionData& session, int electrode_count, int keep,
                                     const std::vector<int>& n_values, const ShrinkagePolicy& policy,
                                     int n_train, int n_reps, Rng& rng, RankTimings* timings) {
    if (session.trials.empty()) throw data_error("rank_electrode_subsets: empty session");
    if (keep < 1 || keep >= electrode_count)
        throw std::invalid_argument("rank_electrode_subsets: keep must be in [1, electrode_count)");
    const std::size_t d = session.trials.front().features.size();
    if (d % static_cast<std::size_t>(electrode_count) != 0) {
        throw data_error("rank_electrode_subsets: feature dimension " + std::to_string(d) +
                         " is not divisible into " + std::to_string(electrode_count) + " blocks");
    }
    for (int n : n_values) {
        if (n < 1 || n > session.config.cycles_per_symbol)
            throw std::invalid_argument("rank_electrode_subsets: n value out of range");
    }
    const std::uint64_t base_key = rng.next_u64();
    const auto subsets = combinations(electrode_count, keep);

    SubsetRanking ranking;
    ranking.entries.resize(subsets.size());

    using clock = std::chrono::steady_clock;

    // Slicing is preprocessing shared by both measures; it stays untimed.
    std::vector<SessionData> sliced;
    sliced.reserve(subsets.size());
    for (const auto& subset : subsets) sliced.push_back(slice_electrode_blocks(session, electrode_count, subset));

    // Phase 1: empirical SNR from one fit per subset on all data.
    const auto snr_start = clock::now();
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const LdaEstimates est = fit_lda(all_trials(sliced[i]), policy);
        ranking.entries[i].electrodes = subsets[i];
        ranking.entries[i].empirical_snr = empirical_snr(est);
    }
    const auto snr_end = clock::now();

    // Phase 2: full validation per subset.
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        Rng sub_rng = Rng::substream(base_key, static_cast<std::uint64_t>(i));
        const AccuracyCurve curve = accuracy_vs_repetitions(sliced[i], n_train, n_reps, policy, sub_rng);
        for (int n : n_values)
            ranking.entries[i].accuracy_by_n.emplace_back(n, curve.points[static_cast<std::size_t>(n - 1)].accuracy);
    }
    const auto val_end = clock::now();

    if (timings) {
        timings->snr_seconds = std::chrono::duration<double>(snr_end - snr_start).count();
        timings->validation_seconds = std::chrono::duration<double>(val_end - snr_end).count();
    }
    return ranking;
}

ProxyComparison proxy_accuracy_comparison(const std::vector<SessionData>& sessions, int fixed_n,
                                          int n_train, int n_reps, const ShrinkagePolicy& policy, Rng& rng) {
    if (sessions.size() < 3) throw data_error("proxy comparison: need at least 3 sessions");
    ProxyComparison cmp;
    cmp.fixed_n = fixed_n;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const SessionData& session = sessions[i];
        if (fixed_n < 1 || fixed_n > session.config.cycles_per_symbol)
            throw std::invalid_argument("proxy comparison: fixed_n out of range for session " + std::to_string(i));
        const SnrReport report = make_snr_report(fit_lda(all_trials(session), policy));
        Rng sub_rng = Rng::substream(rng.next_u64(), i);
        const AccuracyCurve curve = accuracy_vs_repetitions(session, n_train, n_reps, policy, sub_rng);
        ProxyComparison::Row row;
        row.empirical_snr = report.empirical_snr;
        row.peak_to_peak_v1 = report.peak_to_peak_v1;
        row.peak_to_peak_v2 = report.peak_to_peak_v2;
        row.area_under_curve = report.area_under_curve;
        row.accuracy = curve.points[static_cast<std::size_t>(fixed_n - 1)].accuracy;
        cmp.rows.push_back(row);
    }
    std::vector<double> acc;
    std::vector<double> xs;
    for (const auto& row : cmp.rows) acc.push_back(row.accuracy);
    auto regress = [&](auto field) {
        xs.clear();
        for (const auto& row : cmp.rows) xs.push_back(row.*field);
        return linear_fit(xs, acc);
    };
    cmp.snr_regression = regress(&ProxyComparison::Row::empirical_snr);
    cmp.ptp_v1_regression = regress(&ProxyComparison::Row::peak_to_peak_v1);
    cmp.ptp_v2_regression = regress(&ProxyComparison::Row::peak_to_peak_v2);
    cmp.auc_regression = regress(&ProxyComparison::Row::area_under_curve);
    return cmp;
}

void write_curve_csv(const std::string& path, const AccuracyCurve& curve, const FitResult& fit,
                     const SpellerGeometry& geometry, const QuadratureConfig& quad) {
    std::ofstream out(path);
    if (!out) throw data_error("write_curve_csv: cannot open " + path);
    out << "n,accuracy,se,predicted\n";
    for (const auto& point : curve.points) {
        out << point.n << ',' << format_double(point.accuracy) << ',' << format_double(point.se) << ','
            << format_double(symbol_accuracy(geometry, point.n, fit.gamma_fit, quad)) << '\n';
    }
}

void write_ranking_csv(const std::string& path, const SubsetRanking& ranking) {
    std::ofstream out(path);
    if (!out) throw data_error("write_ranking_csv: cannot open " + path);
    out << "subset,empirical_snr";
    if (!ranking.entries.empty()) {
        for (const auto& [n, _] : ranking.entries.front().accuracy_by_n) out << ",snr_sqrtn_n" << n;
        for (const auto& [n, _] : ranking.entries.front().accuracy_by_n) out << ",accuracy_n" << n;
    }
    out << '\n';
    for (const auto& entry : ranking.entries) {
        for (std::size_t i = 0; i < entry.electrodes.size(); ++i) {
            if (i) out << '+';
            out << entry.electrodes[i];
        }
        out << ',' << format_double(entry.empirical_snr);
        for (const auto& [n, _] : entry.accuracy_by_n)
            out << ',' << format_double(std::sqrt(static_cast<double>(n)) * entry.empirical_snr);
        for (const auto& [_, acc] : entry.accuracy_by_n) out << ',' << format_double(acc);
        out << '\n';
    }
}

void write_proxy_csv(const std::string& path, const ProxyComparison& comparison) {
    std::ofstream out(path);
    if (!out) throw data_error("write_proxy_csv: cannot open " + path);
    out << "session,empirical_snr,peak_to_peak_v1,peak_to_peak_v2,area_under_curve,accuracy\n";
    for (std::size_t i = 0; i < comparison.rows.size(); ++i) {
        const auto& row = comparison.rows[i];
        out << i << ',' << format_double(row.empirical_snr) << ',' << format_double(row.peak_to_peak_v1) << ','
            << format_double(row.peak_to_peak_v2) << ',' << format_double(row.area_under_curve) << ','
            << format_double(row.accuracy) << '\n';
    }
}

}  // namespace p300snr
