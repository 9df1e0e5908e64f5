#include "p300snr/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "p300snr/errors.hpp"

namespace p300snr {

LdaEstimates fit_lda(const std::vector<const Trial*>& trials, const ShrinkagePolicy& policy) {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
    for (const Trial* t : trials) (t->label ? n1 : n0)++;
    if (n0 < 2 || n1 < 2) {
        throw data_error("fit_lda: need at least 2 trials per class (got " + std::to_string(n0) +
                         " non-target, " + std::to_string(n1) + " target)");
    }
    const std::size_t d = trials.front()->features.size();
    for (const Trial* t : trials) {
        if (t->features.size() != d) throw data_error("fit_lda: trials have mismatched feature dimensions");
    }
    const std::size_t n = trials.size();

    LdaEstimates est;
    est.mu0_hat.assign(d, 0.0);
    est.mu1_hat.assign(d, 0.0);
    // Scatter matrix sum x x^T (upper triangle), then subtract the class-mean
    // outer products: pooled ML covariance = (S - n0 m0 m0^T - n1 m1 m1^T)/n.
    Matrix scatter(d, d);
    for (const Trial* t : trials) {
        const Vector& x = t->features;
        Vector& mean = t->label ? est.mu1_hat : est.mu0_hat;
        for (std::size_t i = 0; i < d; ++i) {
            mean[i] += x[i];
            const double xi = x[i];
            double* row = &scatter(i, i);
            const double* xj = &x[i];
            for (std::size_t j = i; j < d; ++j) *row++ += xi * *xj++;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        est.mu0_hat[i] /= static_cast<double>(n0);
        est.mu1_hat[i] /= static_cast<double>(n1);
    }
    est.sigma_hat = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double centered = scatter(i, j) -
                                    static_cast<double>(n0) * est.mu0_hat[i] * est.mu0_hat[j] -
                                    static_cast<double>(n1) * est.mu1_hat[i] * est.mu1_hat[j];
            const double value = centered / static_cast<double>(n);
            est.sigma_hat(i, j) = value;
            est.sigma_hat(j, i) = value;
        }
    }

    double lambda = policy.value;
    if (policy.kind == ShrinkagePolicy::Kind::relative) {
        double trace = 0.0;
        for (std::size_t i = 0; i < d; ++i) trace += est.sigma_hat(i, i);
        lambda = policy.value * trace / static_cast<double>(d);
    }
    if (!(lambda >= 0.0)) throw std::invalid_argument("fit_lda: shrinkage must be non-negative");
    est.shrinkage = lambda;

    Matrix ridged = est.sigma_hat;
    for (std::size_t i = 0; i < d; ++i) ridged(i, i) += lambda;
    try {
        const CholeskyFactor chol = CholeskyFactor::decompose(ridged);
        est.weights = chol.solve(subtract(est.mu1_hat, est.mu0_hat));
    } catch (const numerical_error& e) {
        throw numerical_error("fit_lda: covariance factorization failed at lambda = " +
                              std::to_string(lambda) + " (" + e.what() + ")");
    }
    return est;
}

LdaEstimates fit_lda(const std::vector<Trial>& trials, const ShrinkagePolicy& policy) {
    std::vector<const Trial*> view;
    view.reserve(trials.size());
    for (const Trial& t : trials) view.push_back(&t);
    return fit_lda(view, policy);
}

double score(const LdaEstimates& est, const Vector& x) {
    if (x.size() != est.weights.size()) throw std::invalid_argument("score: dimension mismatch");
    return dot(est.weights, x);
}

std::vector<SymbolTrials> index_session(const SessionData& session) {
    std::vector<SymbolTrials> by_symbol(session.config.symbols.size());
    for (const Trial& t : session.trials) {
        if (t.symbol_index < 0 || static_cast<std::size_t>(t.symbol_index) >= by_symbol.size())
            throw data_error("session: trial references symbol " + std::to_string(t.symbol_index) +
                             " outside the configured symbol list");
        by_symbol[static_cast<std::size_t>(t.symbol_index)].push_back(&t);
    }
    return by_symbol;
}

std::vector<Vector> average_stimulus_signals(const SymbolTrials& trials, const SpellerGeometry& geometry,
                                             int cycles_per_symbol, int use_cycles) {
    if (use_cycles < 1 || use_cycles > cycles_per_symbol)
        throw std::invalid_argument("average_stimulus_signals: use_cycles out of range");
    const int stimuli = geometry.n_rows + geometry.n_cols;
    std::vector<Vector> sums(static_cast<std::size_t>(stimuli));
    std::vector<int> counts(static_cast<std::size_t>(stimuli), 0);
    for (const Trial* t : trials) {
        if (t->cycle_index >= use_cycles) continue;
        if (t->stimulus_id < 0 || t->stimulus_id >= stimuli)
            throw data_error("trial has stimulus_id outside the geometry");
        Vector& sum = sums[static_cast<std::size_t>(t->stimulus_id)];
        if (sum.empty()) sum.assign(t->features.size(), 0.0);
        if (sum.size() != t->features.size()) throw data_error("trials have mismatched feature dimensions");
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += t->features[i];
        counts[static_cast<std::size_t>(t->stimulus_id)]++;
    }
    for (int s = 0; s < stimuli; ++s) {
        if (counts[static_cast<std::size_t>(s)] != use_cycles)
            throw data_error("symbol is missing trials for stimulus " + std::to_string(s));
        Vector& sum = sums[static_cast<std::size_t>(s)];
        for (double& v : sum) v /= use_cycles;
    }
    return sums;
}

std::vector<Vector> average_stimulus_signals(const SessionData& session, int symbol_index, int use_cycles) {
    if (symbol_index < 0 || static_cast<std::size_t>(symbol_index) >= session.config.symbols.size())
        throw std::invalid_argument("average_stimulus_signals: symbol_index out of range");
    const auto by_symbol = index_session(session);
    return average_stimulus_signals(by_symbol[static_cast<std::size_t>(symbol_index)],
                                    session.config.geometry, session.config.cycles_per_symbol, use_cycles);
}

namespace {

int argmax_lowest_tie(const Vector& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    return best;
}

}  // namespace

DetectionResult detect_symbol(const LdaEstimates& est, const SymbolTrials& trials,
                              const SpellerGeometry& geometry, int cycles_per_symbol, int use_cycles) {
    const std::vector<Vector> averages =
        average_stimulus_signals(trials, geometry, cycles_per_symbol, use_cycles);
    DetectionResult result;
    result.row_scores.resize(static_cast<std::size_t>(geometry.n_rows));
    result.col_scores.resize(static_cast<std::size_t>(geometry.n_cols));
    for (int r = 0; r < geometry.n_rows; ++r)
        result.row_scores[static_cast<std::size_t>(r)] = score(est, averages[static_cast<std::size_t>(r)]);
    for (int c = 0; c < geometry.n_cols; ++c)
        result.col_scores[static_cast<std::size_t>(c)] =
            score(est, averages[static_cast<std::size_t>(geometry.n_rows + c)]);
    result.row = argmax_lowest_tie(result.row_scores);
    result.col = argmax_lowest_tie(result.col_scores);
    return result;
}

DetectionResult detect_symbol(const LdaEstimates& est, const SessionData& session, int symbol_index,
                              int use_cycles) {
    if (symbol_index < 0 || static_cast<std::size_t>(symbol_index) >= session.config.symbols.size())
        throw std::invalid_argument("detect_symbol: symbol_index out of range");
    const auto by_symbol = index_session(session);
    return detect_symbol(est, by_symbol[static_cast<std::size_t>(symbol_index)], session.config.geometry,
                         session.config.cycles_per_symbol, use_cycles);
}

LdaEstimates oracle_weights(const GaussianP300Model& model) {
    LdaEstimates est;
    est.mu0_hat = model.mu0;
    est.mu1_hat = model.mu1;
    est.sigma_hat = model.sigma;
    est.weights = model.chol.solve(subtract(model.mu1, model.mu0));
    est.shrinkage = 0.0;
    return est;
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j.at(0).size() : 0;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) throw data_error("lda artifact: ragged covariance rows");
        for (std::size_t jj = 0; jj < cols; ++jj) m(i, jj) = j.at(i).at(jj).get<double>();
    }
    return m;
}

}  // namespace

void save_lda(const LdaEstimates& est, const std::string& path) {
    nlohmann::json j;
    j["format"] = "p300snr-lda";
    j["version"] = 1;
    j["mu0_hat"] = est.mu0_hat;
    j["mu1_hat"] = est.mu1_hat;
    j["sigma_hat"] = matrix_to_json(est.sigma_hat);
    j["weights"] = est.weights;
    j["shrinkage"] = est.shrinkage;
    std::ofstream out(path);
    if (!out) throw data_error("save_lda: cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

LdaEstimates load_lda(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("load_lda: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error("load_lda: " + std::string(e.what()));
    }
    try {
        if (j.at("format").get<std::string>() != "p300snr-lda")
            throw data_error("load_lda: not a p300snr-lda artifact");
        LdaEstimates est;
        est.mu0_hat = j.at("mu0_hat").get<Vector>();
        est.mu1_hat = j.at("mu1_hat").get<Vector>();
        est.sigma_hat = matrix_from_json(j.at("sigma_hat"));
        est.weights = j.at("weights").get<Vector>();
        est.shrinkage = j.at("shrinkage").get<double>();
        return est;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("load_lda: malformed artifact (" + std::string(e.what()) + ")");
    }
}

}  // namespace p300snr
