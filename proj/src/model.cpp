#include "p300snr/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "p300snr/errors.hpp"

namespace p300snr {

GaussianP300Model build_model(Vector mu0, Vector mu1, Matrix sigma) {
    const std::size_t d = mu0.size();
    if (d == 0) throw std::invalid_argument("build_model: dimension must be at least 1");
    if (mu1.size() != d || sigma.rows() != d || sigma.cols() != d)
        throw std::invalid_argument("build_model: dimensions of mu0, mu1, sigma must agree");
    if (!is_symmetric(sigma)) throw std::invalid_argument("build_model: sigma must be symmetric");
    GaussianP300Model model;
    model.chol = CholeskyFactor::decompose(sigma);  // throws naming the failing minor
    model.mu0 = std::move(mu0);
    model.mu1 = std::move(mu1);
    model.sigma = std::move(sigma);
    return model;
}

double theoretical_snr(const GaussianP300Model& model) {
    const Vector diff = subtract(model.mu1, model.mu0);
    // gamma^2 = diff^T Sigma^-1 diff = ||L^-1 diff||^2
    const Vector y = model.chol.solve_lower(diff);
    return std::sqrt(dot(y, y));
}

Vector sample_trial(const GaussianP300Model& model, bool is_target, Rng& rng) {
    const std::size_t d = model.dim();
    Vector z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = rng.normal();
    const Vector& mu = is_target ? model.mu1 : model.mu0;
    const Matrix& l = model.chol.lower();
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) {
        double s = mu[i];
        for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * z[k];
        x[i] = s;
    }
    return x;
}

GaussianP300Model make_synthetic_model(std::size_t dim, double gamma, CovarianceStructure structure,
                                       double rho, Rng& rng) {
    if (dim == 0) throw std::domain_error("make_synthetic_model: dim must be at least 1");
    if (!(gamma >= 0.0)) throw std::domain_error("make_synthetic_model: gamma must be non-negative");
    if (structure == CovarianceStructure::ar1 && !(std::fabs(rho) < 1.0))
        throw std::domain_error("make_synthetic_model: ar1 requires |rho| < 1");

    Matrix sigma(dim, dim);
    if (structure == CovarianceStructure::identity) {
        sigma = Matrix::identity(dim);
    } else {
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                sigma(i, j) = std::pow(rho, std::fabs(static_cast<double>(i) - static_cast<double>(j)));
    }

    Vector direction(dim);
    for (std::size_t i = 0; i < dim; ++i) direction[i] = rng.normal();

    GaussianP300Model model = build_model(Vector(dim, 0.0), Vector(dim, 0.0), std::move(sigma));
    // Rescale the direction so diff^T Sigma^-1 diff = gamma^2 exactly.
    const Vector y = model.chol.solve_lower(direction);
    const double q = std::sqrt(dot(y, y));
    Vector mu1(dim, 0.0);
    if (gamma > 0.0) {
        if (q == 0.0) throw numerical_error("make_synthetic_model: degenerate random direction");
        const double scale = gamma / q;
        for (std::size_t i = 0; i < dim; ++i) mu1[i] = direction[i] * scale;
    }
    model.mu1 = std::move(mu1);
    return model;
}

void SessionConfig::validate() const {
    geometry.validate();
    if (cycles_per_symbol < 1) throw std::invalid_argument("session config: cycles_per_symbol must be >= 1");
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const auto [row, col] = symbols[s];
        if (row < 0 || row >= geometry.n_rows || col < 0 || col >= geometry.n_cols) {
            throw std::invalid_argument("session config: target of symbol " + std::to_string(s) +
                                        " is outside the " + std::to_string(geometry.n_rows) + "x" +
                                        std::to_string(geometry.n_cols) + " matrix");
        }
    }
}

SessionData simulate_session(const GaussianP300Model& model, const SessionConfig& config) {
    config.validate();
    SessionData session;
    session.config = config;
    const int stimuli = config.stimuli_per_cycle();
    session.trials.reserve(config.symbols.size() * static_cast<std::size_t>(config.cycles_per_symbol) *
                           static_cast<std::size_t>(stimuli));
    for (std::size_t s = 0; s < config.symbols.size(); ++s) {
        Rng rng = Rng::substream(config.rng_seed, s);
        const auto [target_row, target_col] = config.symbols[s];
        for (int cycle = 0; cycle < config.cycles_per_symbol; ++cycle) {
            const std::vector<int> order = rng.permutation(stimuli);
            for (int stim : order) {
                const bool is_target = stim == target_row || stim == config.geometry.n_rows + target_col;
                Trial trial;
                trial.features = sample_trial(model, is_target, rng);
                trial.label = is_target ? 1 : 0;
                trial.stimulus_id = stim;
                trial.cycle_index = cycle;
                trial.symbol_index = static_cast<int>(s);
                session.trials.push_back(std::move(trial));
            }
        }
    }
    return session;
}

SessionData slice_electrode_blocks(const SessionData& session, int electrode_count,
                                   const std::vector<int>& keep) {
    if (electrode_count < 1) throw std::invalid_argument("slice: electrode_count must be >= 1");
    if (session.trials.empty()) return session;
    const std::size_t d = session.trials.front().features.size();
    if (d % static_cast<std::size_t>(electrode_count) != 0) {
        throw data_error("slice: feature dimension " + std::to_string(d) + " is not divisible into " +
                         std::to_string(electrode_count) + " electrode blocks");
    }
    const std::size_t block = d / static_cast<std::size_t>(electrode_count);
    for (int e : keep) {
        if (e < 0 || e >= electrode_count)
            throw std::invalid_argument("slice: electrode index " + std::to_string(e) + " out of range");
    }
    SessionData out;
    out.config = session.config;
    out.trials.reserve(session.trials.size());
    for (const Trial& t : session.trials) {
        if (t.features.size() != d) throw data_error("slice: inconsistent feature dimensions");
        Trial copy;
        copy.label = t.label;
        copy.stimulus_id = t.stimulus_id;
        copy.cycle_index = t.cycle_index;
        copy.symbol_index = t.symbol_index;
        copy.features.reserve(block * keep.size());
        for (int e : keep) {
            const auto begin = t.features.begin() + static_cast<std::ptrdiff_t>(block * static_cast<std::size_t>(e));
            copy.features.insert(copy.features.end(), begin, begin + static_cast<std::ptrdiff_t>(block));
        }
        out.trials.push_back(std::move(copy));
    }
    return out;
}

}  // namespace p300snr
