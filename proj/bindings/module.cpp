// Python bindings for the toolkit's main operations. Vectors and matrices
// cross the boundary as numpy arrays; models, sessions, and estimates stay
// opaque handles.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "p300snr/epochs.hpp"
#include "p300snr/harness.hpp"
#include "p300snr/session_io.hpp"

namespace py = pybind11;
using namespace p300snr;

namespace {

Vector to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return Vector(a.data(), a.data() + a.shape(0));
}

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data());
    return m;
}

py::array_t<double> from_vector(const Vector& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> from_matrix(const Matrix& m) {
    py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    std::copy(m.data(), m.data() + m.rows() * m.cols(), out.mutable_data());
    return out;
}

QuadratureConfig quad_config(int panel_count, double half_width) {
    QuadratureConfig quad;
    quad.panel_count = panel_count;
    quad.half_width = half_width;
    return quad;
}

ShrinkagePolicy shrinkage_policy(const std::string& kind, double value) {
    if (kind == "relative") return ShrinkagePolicy::relative(value);
    if (kind == "fixed") return ShrinkagePolicy::fixed(value);
    throw std::invalid_argument("shrinkage kind must be 'relative' or 'fixed'");
}

CovarianceStructure structure_from(const std::string& name) {
    if (name == "identity") return CovarianceStructure::identity;
    if (name == "ar1") return CovarianceStructure::ar1;
    throw std::invalid_argument("structure must be 'identity' or 'ar1'");
}

SessionConfig session_config(int rows, int cols, int cycles,
                             const std::vector<std::pair<int, int>>& symbols, std::uint64_t seed) {
    SessionConfig config;
    config.geometry = {rows, cols};
    config.cycles_per_symbol = cycles;
    config.symbols = symbols;
    config.rng_seed = seed;
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "P300 speller accuracy prediction and validation from single-trial SNR";

    // ------------------------------------------------------------- accuracy
    m.def(
        "accuracy_function",
        [](int n, double x, int panels, double hw) { return accuracy_function(n, x, quad_config(panels, hw)); },
        py::arg("n_alternatives"), py::arg("effective_snr"), py::arg("panel_count") = 64,
        py::arg("half_width") = 12.0,
        "Selection accuracy of one out of N alternatives at effective SNR x.");
    m.def(
        "accuracy_function_derivative",
        [](int n, double x, int panels, double hw) {
            return accuracy_function_derivative(n, x, quad_config(panels, hw));
        },
        py::arg("n_alternatives"), py::arg("effective_snr"), py::arg("panel_count") = 64,
        py::arg("half_width") = 12.0);
    m.def(
        "symbol_accuracy",
        [](int rows, int cols, int cycles, double gamma) {
            return symbol_accuracy(SpellerGeometry{rows, cols}, cycles, gamma);
        },
        py::arg("rows"), py::arg("cols"), py::arg("cycles"), py::arg("gamma"),
        "H_rows(sqrt(n) gamma) * H_cols(sqrt(n) gamma).");
    m.def(
        "invert_accuracy",
        [](int rows, int cols, int cycles, double target) {
            return invert_accuracy(SpellerGeometry{rows, cols}, cycles, target);
        },
        py::arg("rows"), py::arg("cols"), py::arg("cycles"), py::arg("target_accuracy"));
    m.def(
        "score_moments",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mu0,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& mu1,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& sigma, int cycles) {
            const ScoreMoments sm = score_moments(to_vector(mu0), to_vector(mu1), to_matrix(sigma), cycles);
            return py::make_tuple(sm.m0, sm.m1, sm.sigma_n);
        },
        py::arg("mu0"), py::arg("mu1"), py::arg("sigma"), py::arg("cycles"),
        "Returns (m0, m1, sigma_n) of the classifier score after n cycles.");

    // ---------------------------------------------------------------- model
    py::class_<GaussianP300Model>(m, "GaussianP300Model")
        .def_property_readonly("mu0", [](const GaussianP300Model& g) { return from_vector(g.mu0); })
        .def_property_readonly("mu1", [](const GaussianP300Model& g) { return from_vector(g.mu1); })
        .def_property_readonly("sigma", [](const GaussianP300Model& g) { return from_matrix(g.sigma); })
        .def_property_readonly("dim", &GaussianP300Model::dim)
        .def("__repr__", [](const GaussianP300Model& g) {
            return "<GaussianP300Model dim=" + std::to_string(g.dim()) +
                   " snr=" + std::to_string(theoretical_snr(g)) + ">";
        });
    m.def(
        "build_model",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& mu0,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& mu1,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& sigma) {
            return build_model(to_vector(mu0), to_vector(mu1), to_matrix(sigma));
        },
        py::arg("mu0"), py::arg("mu1"), py::arg("sigma"));
    m.def(
        "make_synthetic_model",
        [](std::size_t dim, double gamma, const std::string& structure, double rho, std::uint64_t seed) {
            Rng rng(seed);
            return make_synthetic_model(dim, gamma, structure_from(structure), rho, rng);
        },
        py::arg("dim"), py::arg("gamma"), py::arg("structure") = "identity", py::arg("rho") = 0.0,
        py::arg("seed") = 0);
    m.def("theoretical_snr", &theoretical_snr, py::arg("model"));

    // -------------------------------------------------------------- session
    py::class_<SessionData>(m, "SessionData")
        .def_property_readonly("n_trials", [](const SessionData& s) { return s.trials.size(); })
        .def_property_readonly("n_symbols", [](const SessionData& s) { return s.config.symbols.size(); })
        .def_property_readonly("cycles_per_symbol",
                               [](const SessionData& s) { return s.config.cycles_per_symbol; })
        .def_property_readonly("geometry",
                               [](const SessionData& s) {
                                   return py::make_tuple(s.config.geometry.n_rows, s.config.geometry.n_cols);
                               })
        .def_property_readonly("symbols", [](const SessionData& s) { return s.config.symbols; })
        .def_property_readonly("feature_dim",
                               [](const SessionData& s) {
                                   return s.trials.empty() ? 0 : s.trials.front().features.size();
                               })
        .def("__repr__", [](const SessionData& s) {
            return "<SessionData symbols=" + std::to_string(s.config.symbols.size()) +
                   " trials=" + std::to_string(s.trials.size()) + ">";
        });
    m.def(
        "simulate_session",
        [](const GaussianP300Model& model, int rows, int cols, int cycles,
           const std::vector<std::pair<int, int>>& symbols, std::uint64_t seed) {
            return simulate_session(model, session_config(rows, cols, cycles, symbols, seed));
        },
        py::arg("model"), py::arg("rows"), py::arg("cols"), py::arg("cycles"), py::arg("symbols"),
        py::arg("seed"));
    m.def("write_session",
          [](const SessionData& s, const std::string& path) { write_session(s, path); },
          py::arg("session"), py::arg("path"));
    m.def("read_session", [](const std::string& path) { return read_session(path); }, py::arg("path"));
    m.def(
        "slice_electrode_blocks",
        [](const SessionData& s, int electrode_count, const std::vector<int>& keep) {
            return slice_electrode_blocks(s, electrode_count, keep);
        },
        py::arg("session"), py::arg("electrode_count"), py::arg("keep"));

    // ------------------------------------------------------------------ lda
    py::class_<LdaEstimates>(m, "LdaEstimates")
        .def_property_readonly("mu0_hat", [](const LdaEstimates& e) { return from_vector(e.mu0_hat); })
        .def_property_readonly("mu1_hat", [](const LdaEstimates& e) { return from_vector(e.mu1_hat); })
        .def_property_readonly("weights", [](const LdaEstimates& e) { return from_vector(e.weights); })
        .def_property_readonly("sigma_hat", [](const LdaEstimates& e) { return from_matrix(e.sigma_hat); })
        .def_readonly("shrinkage", &LdaEstimates::shrinkage);
    m.def(
        "fit_lda",
        [](const SessionData& session, const std::string& kind, double value) {
            return fit_lda(session.trials, shrinkage_policy(kind, value));
        },
        py::arg("session"), py::arg("shrinkage_kind") = "relative", py::arg("shrinkage") = 1e-6);
    m.def("oracle_weights", &oracle_weights, py::arg("model"));
    m.def(
        "lda_score",
        [](const LdaEstimates& est, const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
            return score(est, to_vector(x));
        },
        py::arg("estimates"), py::arg("x"));
    m.def(
        "detect_symbol",
        [](const LdaEstimates& est, const SessionData& session, int symbol_index, int use_cycles) {
            const DetectionResult r = detect_symbol(est, session, symbol_index, use_cycles);
            return py::make_tuple(r.row, r.col);
        },
        py::arg("estimates"), py::arg("session"), py::arg("symbol_index"), py::arg("use_cycles"),
        "Returns the detected (row, col).");
    m.def("save_lda", &save_lda, py::arg("estimates"), py::arg("path"));
    m.def("load_lda", &load_lda, py::arg("path"));

    // ------------------------------------------------------------------ snr
    m.def("empirical_snr", &empirical_snr, py::arg("estimates"));
    m.def("peak_to_peak_v1", &peak_to_peak_v1, py::arg("estimates"));
    m.def("peak_to_peak_v2", &peak_to_peak_v2, py::arg("estimates"));
    m.def("area_under_curve", &area_under_curve, py::arg("estimates"));
    m.def(
        "snr_report",
        [](const LdaEstimates& est) {
            const SnrReport r = make_snr_report(est);
            py::dict out;
            out["empirical_snr"] = r.empirical_snr;
            out["peak_to_peak_v1"] = r.peak_to_peak_v1;
            out["peak_to_peak_v2"] = r.peak_to_peak_v2;
            out["area_under_curve"] = r.area_under_curve;
            out["shrinkage_used"] = r.shrinkage_used;
            return out;
        },
        py::arg("estimates"));

    // -------------------------------------------------------------- harness
    py::class_<AccuracyCurve>(m, "AccuracyCurve")
        .def_property_readonly("n",
                               [](const AccuracyCurve& c) {
                                   std::vector<int> out;
                                   for (const auto& p : c.points) out.push_back(p.n);
                                   return out;
                               })
        .def_property_readonly("accuracy",
                               [](const AccuracyCurve& c) {
                                   Vector out;
                                   for (const auto& p : c.points) out.push_back(p.accuracy);
                                   return from_vector(out);
                               })
        .def_property_readonly("se",
                               [](const AccuracyCurve& c) {
                                   Vector out;
                                   for (const auto& p : c.points) out.push_back(p.se);
                                   return from_vector(out);
                               })
        .def_readonly("n_train", &AccuracyCurve::n_train)
        .def_readonly("n_reps", &AccuracyCurve::n_reps);
    m.def(
        "accuracy_vs_repetitions",
        [](const SessionData& session, int n_train, int n_reps, std::uint64_t seed,
           const std::string& kind, double value) {
            Rng rng(seed);
            return accuracy_vs_repetitions(session, n_train, n_reps, shrinkage_policy(kind, value), rng);
        },
        py::arg("session"), py::arg("n_train") = 10, py::arg("n_reps") = 100, py::arg("seed") = 1,
        py::arg("shrinkage_kind") = "relative", py::arg("shrinkage") = 1e-6);
    m.def(
        "fit_gamma",
        [](const AccuracyCurve& curve, int rows, int cols) {
            const FitResult fit = fit_gamma(curve, SpellerGeometry{rows, cols});
            return py::make_tuple(fit.gamma_fit, fit.sse);
        },
        py::arg("curve"), py::arg("rows") = 6, py::arg("cols") = 6, "Returns (gamma_fit, sse).");
    m.def(
        "fit_gamma_points",
        [](const std::vector<int>& ns, const py::array_t<double, py::array::c_style | py::array::forcecast>& accs,
           int rows, int cols) {
            if (static_cast<std::size_t>(accs.shape(0)) != ns.size())
                throw std::invalid_argument("fit_gamma_points: length mismatch");
            AccuracyCurve curve;
            for (std::size_t i = 0; i < ns.size(); ++i)
                curve.points.push_back({ns[i], accs.data()[i], 0.0});
            const FitResult fit = fit_gamma(curve, SpellerGeometry{rows, cols});
            return py::make_tuple(fit.gamma_fit, fit.sse);
        },
        py::arg("n"), py::arg("accuracy"), py::arg("rows") = 6, py::arg("cols") = 6);
    m.def(
        "linear_fit",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& xs,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& ys) {
            const RegressionStats stats = linear_fit(to_vector(xs), to_vector(ys));
            py::dict out;
            out["slope"] = stats.slope;
            out["intercept"] = stats.intercept;
            out["pearson_r"] = stats.pearson_r;
            out["p_value"] = stats.p_value;
            return out;
        },
        py::arg("xs"), py::arg("ys"));
    m.def(
        "rank_electrode_subsets",
        [](const SessionData& session, int electrode_count, int keep, const std::vector<int>& n_values,
           int n_train, int n_reps, std::uint64_t seed, const std::string& kind, double value) {
            Rng rng(seed);
            const SubsetRanking ranking = rank_electrode_subsets(
                session, electrode_count, keep, n_values, shrinkage_policy(kind, value), n_train, n_reps, rng);
            py::list out;
            for (const auto& entry : ranking.entries) {
                py::dict d;
                d["electrodes"] = entry.electrodes;
                d["empirical_snr"] = entry.empirical_snr;
                d["accuracy_by_n"] = entry.accuracy_by_n;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("session"), py::arg("electrode_count"), py::arg("keep"), py::arg("n_values"),
        py::arg("n_train") = 10, py::arg("n_reps") = 100, py::arg("seed") = 1,
        py::arg("shrinkage_kind") = "relative", py::arg("shrinkage") = 1e-6);
    m.def(
        "proxy_accuracy_comparison",
        [](const std::vector<SessionData>& sessions, int fixed_n, int n_train, int n_reps,
           std::uint64_t seed, const std::string& kind, double value) {
            Rng rng(seed);
            const ProxyComparison cmp = proxy_accuracy_comparison(sessions, fixed_n, n_train, n_reps,
                                                                  shrinkage_policy(kind, value), rng);
            auto stats = [](const RegressionStats& s) {
                py::dict d;
                d["slope"] = s.slope;
                d["intercept"] = s.intercept;
                d["pearson_r"] = s.pearson_r;
                d["p_value"] = s.p_value;
                return d;
            };
            py::dict out;
            py::list rows;
            for (const auto& row : cmp.rows) {
                py::dict d;
                d["empirical_snr"] = row.empirical_snr;
                d["peak_to_peak_v1"] = row.peak_to_peak_v1;
                d["peak_to_peak_v2"] = row.peak_to_peak_v2;
                d["area_under_curve"] = row.area_under_curve;
                d["accuracy"] = row.accuracy;
                rows.append(std::move(d));
            }
            out["rows"] = std::move(rows);
            out["empirical_snr"] = stats(cmp.snr_regression);
            out["peak_to_peak_v1"] = stats(cmp.ptp_v1_regression);
            out["peak_to_peak_v2"] = stats(cmp.ptp_v2_regression);
            out["area_under_curve"] = stats(cmp.auc_regression);
            return out;
        },
        py::arg("sessions"), py::arg("fixed_n") = 3, py::arg("n_train") = 10, py::arg("n_reps") = 100,
        py::arg("seed") = 1, py::arg("shrinkage_kind") = "relative", py::arg("shrinkage") = 1e-6);

    // --------------------------------------------------------------- ingest
    m.def("samples_per_epoch", &samples_per_epoch, py::arg("window_ms"), py::arg("sample_rate"));
    m.def(
        "downsample",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& channels, double rate,
           int factor) {
            if (channels.ndim() != 2) throw std::invalid_argument("channels must be 2-D [electrode, sample]");
            RawRecording raw;
            raw.sample_rate = rate;
            for (py::ssize_t e = 0; e < channels.shape(0); ++e) {
                raw.channels.emplace_back(channels.data() + e * channels.shape(1),
                                          channels.data() + (e + 1) * channels.shape(1));
            }
            const RawRecording ds = downsample(raw, factor);
            py::array_t<double> out({static_cast<py::ssize_t>(ds.channels.size()),
                                     static_cast<py::ssize_t>(ds.n_samples())});
            for (std::size_t e = 0; e < ds.channels.size(); ++e)
                std::copy(ds.channels[e].begin(), ds.channels[e].end(),
                          out.mutable_data() + e * static_cast<py::ssize_t>(ds.n_samples()));
            return py::make_tuple(out, ds.sample_rate);
        },
        py::arg("channels"), py::arg("sample_rate"), py::arg("factor"),
        "Block-average by factor; returns (channels, new_rate).");

    m.attr("__version__") = "0.1.0";
}
