// p300snr: speller accuracy prediction and validation from single-trial SNR.
//
// Subcommands map one-to-one onto the toolkit pipelines:
//   accuracy-table   H_N(x) values on a grid (CSV: N,x,H)
//   simulate         sample a spelling session from a Gaussian model
//   fit-curve        validation curve + best-fit gamma for a session
//   rank-electrodes  brute-force electrode subset ranking
//   proxies          SNR vs. peak-to-peak/area proxies across sessions
//   erp              class-mean ERP export
//
// Every output file gets a <output>.manifest.json sidecar recording the
// command, the full resolved parameter set, and the seed; outputs are
// deterministic given the manifest.
//
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "p300snr/errors.hpp"
#include "p300snr/harness.hpp"
#include "p300snr/session_io.hpp"

using namespace p300snr;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Substream keys for session-level draws; symbol substreams use the symbol
// index, so purpose keys live far above any plausible symbol count.
constexpr std::uint64_t kTargetStreamKey = 0xFFFFFFFF00000001ULL;
constexpr std::uint64_t kModelStreamKey = 0xFFFFFFFF00000002ULL;

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

void write_manifest(const std::string& output_path, const std::string& command, const json& parameters,
                    std::uint64_t seed) {
    json manifest;
    manifest["command"] = command;
    manifest["parameters"] = parameters;
    manifest["rng_seed"] = seed;
    manifest["toolkit_version"] = kVersion;
    manifest["timestamp"] = iso_timestamp();
    const std::string path = output_path + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw data_error("cannot write manifest " + path);
    out << manifest.dump(2) << "\n";
}

ShrinkagePolicy parse_shrinkage(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string value_str = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
        if (kind == "relative") {
            return ShrinkagePolicy::relative(value_str.empty() ? 1e-6 : std::stod(value_str));
        }
        if (kind == "fixed") {
            if (value_str.empty()) throw std::invalid_argument("fixed shrinkage needs a value");
            return ShrinkagePolicy::fixed(std::stod(value_str));
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("bad --shrinkage '" + text + "' (use relative:EPS or fixed:LAMBDA)");
    }
    throw std::invalid_argument("bad --shrinkage '" + text + "' (use relative:EPS or fixed:LAMBDA)");
}

json shrinkage_json(const std::string& text) {
    const ShrinkagePolicy policy = parse_shrinkage(text);
    return {{"kind", policy.kind == ShrinkagePolicy::Kind::fixed ? "fixed" : "relative"},
            {"value", policy.value}};
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
    return out;
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

// ---------------------------------------------------------------- simulate --

struct SimulateOptions {
    std::string config_path;
    std::string output = "session.json";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int cycles_override = 0;
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw data_error("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw data_error("config " + path + ": " + e.what());
    }
}

int run_simulate(const SimulateOptions& opt) {
    const json config = load_config(opt.config_path);
    for (const auto& [key, _] : config.items()) {
        static const std::set<std::string> known = {"rows",   "cols",  "cycles", "symbol_count",
                                                    "symbols", "seed", "model"};
        if (!known.count(key)) throw std::invalid_argument("config: unknown field '" + key + "'");
    }

    SessionConfig session_config;
    session_config.geometry.n_rows = config.value("rows", 6);
    session_config.geometry.n_cols = config.value("cols", 6);
    session_config.cycles_per_symbol = config.value("cycles", 15);
    if (opt.cycles_override > 0) session_config.cycles_per_symbol = opt.cycles_override;
    session_config.rng_seed = opt.seed_given ? opt.seed : config.value("seed", std::uint64_t{1});

    const json model_config = config.value("model", json::object());
    const std::size_t dim = model_config.value("dim", std::size_t{312});
    const double gamma = model_config.value("gamma", 0.7);
    const std::string structure_name = model_config.value("structure", std::string{"identity"});
    const double rho = model_config.value("rho", 0.0);
    const int electrode_count = model_config.value("electrode_count", 8);
    const std::uint64_t model_seed = model_config.value("model_seed", session_config.rng_seed);
    CovarianceStructure structure;
    if (structure_name == "identity") {
        structure = CovarianceStructure::identity;
    } else if (structure_name == "ar1") {
        structure = CovarianceStructure::ar1;
    } else {
        throw std::invalid_argument("config: model.structure must be 'identity' or 'ar1'");
    }

    if (config.contains("symbols")) {
        for (const auto& pair : config.at("symbols"))
            session_config.symbols.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
    } else {
        const int count = config.value("symbol_count", 50);
        Rng targets = Rng::substream(session_config.rng_seed, kTargetStreamKey);
        for (int i = 0; i < count; ++i) {
            session_config.symbols.emplace_back(
                static_cast<int>(targets.integer_below(static_cast<std::uint64_t>(session_config.geometry.n_rows))),
                static_cast<int>(targets.integer_below(static_cast<std::uint64_t>(session_config.geometry.n_cols))));
        }
    }

    Rng model_rng = Rng::substream(model_seed, kModelStreamKey);
    const GaussianP300Model model = make_synthetic_model(dim, gamma, structure, rho, model_rng);
    const SessionData session = simulate_session(model, session_config);

    SessionFileInfo info;
    if (electrode_count > 0 && dim % static_cast<std::size_t>(electrode_count) == 0) {
        info.electrode_count = electrode_count;
        info.samples_per_electrode = static_cast<int>(dim) / electrode_count;
    }
    write_session(session, opt.output, info);

    json parameters;
    parameters["rows"] = session_config.geometry.n_rows;
    parameters["cols"] = session_config.geometry.n_cols;
    parameters["cycles"] = session_config.cycles_per_symbol;
    parameters["symbol_count"] = session_config.symbols.size();
    parameters["model"] = {{"dim", dim},           {"gamma", gamma}, {"structure", structure_name},
                           {"rho", rho},           {"model_seed", model_seed},
                           {"electrode_count", electrode_count}};
    parameters["output"] = opt.output;
    write_manifest(opt.output, "simulate", parameters, session_config.rng_seed);
    std::cout << "wrote " << opt.output << " (" << session.trials.size() << " trials, gamma "
              << theoretical_snr(model) << ")\n";
    return 0;
}

// ---------------------------------------------------------- accuracy-table --

struct TableOptions {
    std::string n_list = "2,3,4,5,6,8,10,12";
    double x_min = -2.0;
    double x_max = 8.0;
    double x_step = 0.25;
    std::string cycles = "1";
    std::string output = "accuracy_table.csv";
};

int run_accuracy_table(const TableOptions& opt) {
    const std::vector<int> ns = parse_int_list(opt.n_list);
    const std::vector<int> cycles = parse_int_list(opt.cycles);
    if (!(opt.x_step > 0.0) || opt.x_max < opt.x_min)
        throw std::invalid_argument("accuracy-table: bad x grid");

    std::ofstream out(opt.output);
    if (!out) throw data_error("cannot open " + opt.output);
    out << "N,x,H\n";
    for (int n : ns) {
        for (int cycle : cycles) {
            if (cycle < 1) throw std::invalid_argument("accuracy-table: cycles must be positive");
            const double scale = std::sqrt(static_cast<double>(cycle));
            for (double x = opt.x_min; x <= opt.x_max + 1e-12; x += opt.x_step) {
                const double eff = scale * x;
                out << n << ',' << format_double(eff) << ',' << format_double(accuracy_function(n, eff))
                    << '\n';
            }
        }
    }
    out.close();

    json parameters;
    parameters["N"] = ns;
    parameters["x_min"] = opt.x_min;
    parameters["x_max"] = opt.x_max;
    parameters["x_step"] = opt.x_step;
    parameters["cycles"] = cycles;
    parameters["output"] = opt.output;
    write_manifest(opt.output, "accuracy-table", parameters, 0);
    std::cout << "wrote " << opt.output << "\n";
    return 0;
}

// -------------------------------------------------------------- fit-curve --

struct FitCurveOptions {
    std::string input;
    std::string output = "curve.csv";
    int n_train = 10;
    int n_reps = 100;
    std::uint64_t seed = 1;
    std::string shrinkage = "relative:1e-6";
};

int run_fit_curve(const FitCurveOptions& opt) {
    const SessionData session = read_session(opt.input);
    Rng rng(opt.seed);
    const AccuracyCurve curve =
        accuracy_vs_repetitions(session, opt.n_train, opt.n_reps, parse_shrinkage(opt.shrinkage), rng);
    const FitResult fit = fit_gamma(curve, session.config.geometry);
    write_curve_csv(opt.output, curve, fit, session.config.geometry);

    json fit_json;
    fit_json["gamma_fit"] = fit.gamma_fit;
    fit_json["sse"] = fit.sse;
    fit_json["n_train"] = opt.n_train;
    fit_json["n_reps"] = opt.n_reps;
    const std::string fit_path = opt.output + ".fit.json";
    std::ofstream fit_out(fit_path);
    if (!fit_out) throw data_error("cannot write " + fit_path);
    fit_out << fit_json.dump(2) << "\n";

    json parameters;
    parameters["input"] = opt.input;
    parameters["n_train"] = opt.n_train;
    parameters["n_reps"] = opt.n_reps;
    parameters["shrinkage"] = shrinkage_json(opt.shrinkage);
    parameters["output"] = opt.output;
    write_manifest(opt.output, "fit-curve", parameters, opt.seed);
    std::cout << "wrote " << opt.output << " (gamma_fit " << fit.gamma_fit << ", sse " << fit.sse << ")\n";
    return 0;
}

// --------------------------------------------------------- rank-electrodes --

struct RankOptions {
    std::string input;
    std::string output = "ranking.csv";
    int keep = 7;
    int electrodes = 0;  // 0: take from the session header
    std::string n_values = "1,3,5";
    int n_train = 10;
    int n_reps = 100;
    std::uint64_t seed = 1;
    std::string shrinkage = "relative:1e-6";
};

int run_rank_electrodes(const RankOptions& opt) {
    SessionFileInfo info;
    const SessionData session = read_session(opt.input, &info);
    int electrode_count = opt.electrodes > 0 ? opt.electrodes : info.electrode_count;
    if (electrode_count <= 0) {
        throw std::invalid_argument(
            "rank-electrodes: the session file does not declare an electrode count; pass --electrodes");
    }
    std::vector<int> n_values;
    for (int n : parse_int_list(opt.n_values))
        if (n >= 1 && n <= session.config.cycles_per_symbol) n_values.push_back(n);
    if (n_values.empty()) throw std::invalid_argument("rank-electrodes: no usable --n-values");

    Rng rng(opt.seed);
    RankTimings timings;
    const SubsetRanking ranking = rank_electrode_subsets(
        session, electrode_count, opt.keep, n_values, parse_shrinkage(opt.shrinkage), opt.n_train,
        opt.n_reps, rng, &timings);
    write_ranking_csv(opt.output, ranking);

    json parameters;
    parameters["input"] = opt.input;
    parameters["electrodes"] = electrode_count;
    parameters["keep"] = opt.keep;
    parameters["n_values"] = n_values;
    parameters["n_train"] = opt.n_train;
    parameters["n_reps"] = opt.n_reps;
    parameters["shrinkage"] = shrinkage_json(opt.shrinkage);
    parameters["output"] = opt.output;
    write_manifest(opt.output, "rank-electrodes", parameters, opt.seed);
    std::cout << "wrote " << opt.output << " (" << ranking.entries.size() << " subsets; snr "
              << timings.snr_seconds << "s, validation " << timings.validation_seconds << "s)\n";
    return 0;
}

// ----------------------------------------------------------------- proxies --

struct ProxyOptions {
    std::vector<std::string> inputs;
    std::string output = "proxies.csv";
    int fixed_n = 3;
    int n_train = 10;
    int n_reps = 100;
    std::uint64_t seed = 1;
    std::string shrinkage = "relative:1e-6";
};

json regression_json(const RegressionStats& stats) {
    return {{"slope", stats.slope},
            {"intercept", stats.intercept},
            {"pearson_r", stats.pearson_r},
            {"p_value", stats.p_value}};
}

int run_proxies(const ProxyOptions& opt) {
    std::vector<SessionData> sessions;
    sessions.reserve(opt.inputs.size());
    for (const std::string& path : opt.inputs) sessions.push_back(read_session(path));
    Rng rng(opt.seed);
    const ProxyComparison cmp = proxy_accuracy_comparison(sessions, opt.fixed_n, opt.n_train, opt.n_reps,
                                                          parse_shrinkage(opt.shrinkage), rng);
    write_proxy_csv(opt.output, cmp);

    json reg;
    reg["fixed_n"] = cmp.fixed_n;
    reg["empirical_snr"] = regression_json(cmp.snr_regression);
    reg["peak_to_peak_v1"] = regression_json(cmp.ptp_v1_regression);
    reg["peak_to_peak_v2"] = regression_json(cmp.ptp_v2_regression);
    reg["area_under_curve"] = regression_json(cmp.auc_regression);
    const std::string reg_path = opt.output + ".regression.json";
    std::ofstream reg_out(reg_path);
    if (!reg_out) throw data_error("cannot write " + reg_path);
    reg_out << reg.dump(2) << "\n";

    json parameters;
    parameters["inputs"] = opt.inputs;
    parameters["fixed_n"] = opt.fixed_n;
    parameters["n_train"] = opt.n_train;
    parameters["n_reps"] = opt.n_reps;
    parameters["shrinkage"] = shrinkage_json(opt.shrinkage);
    parameters["output"] = opt.output;
    write_manifest(opt.output, "proxies", parameters, opt.seed);
    std::cout << "wrote " << opt.output << "\n";
    return 0;
}

// --------------------------------------------------------------------- erp --

int run_erp(const std::string& input, const std::string& output) {
    const SessionData session = read_session(input);
    write_erp_csv(session, output);
    json parameters;
    parameters["input"] = input;
    parameters["output"] = output;
    write_manifest(output, "erp", parameters, 0);
    std::cout << "wrote " << output << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"P300 speller accuracy prediction and validation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    TableOptions table;
    CLI::App* cmd_table = app.add_subcommand("accuracy-table", "Evaluate H_N(x) on a grid (CSV: N,x,H)");
    cmd_table->add_option("--N", table.n_list, "Comma-separated alternative counts");
    cmd_table->add_option("--x-min", table.x_min, "Grid start");
    cmd_table->add_option("--x-max", table.x_max, "Grid end");
    cmd_table->add_option("--x-step", table.x_step, "Grid step");
    cmd_table->add_option("--cycles", table.cycles,
                          "Averaging-cycle counts; each scales the x grid by sqrt(n)");
    cmd_table->add_option("--output", table.output, "Output CSV path");

    SimulateOptions sim;
    CLI::App* cmd_sim = app.add_subcommand("simulate", "Sample a spelling session from a Gaussian model");
    cmd_sim->add_option("--config", sim.config_path, "JSON config (defaults: 6x6, 15 cycles, 50 symbols)");
    cmd_sim->add_option("--output", sim.output, "Session file path");
    cmd_sim->add_option("--seed", sim.seed, "Override the config seed")->each([&](const std::string&) {
        sim.seed_given = true;
    });
    cmd_sim->add_option("--cycles", sim.cycles_override, "Override cycles per symbol");

    FitCurveOptions fitc;
    CLI::App* cmd_fit = app.add_subcommand("fit-curve", "Accuracy-vs-cycles curve and best-fit gamma");
    cmd_fit->add_option("--input", fitc.input, "Session file")->required();
    cmd_fit->add_option("--output", fitc.output, "Output CSV path");
    cmd_fit->add_option("--n-train", fitc.n_train, "Training symbols per repetition");
    cmd_fit->add_option("--n-reps", fitc.n_reps, "Number of repetitions");
    cmd_fit->add_option("--seed", fitc.seed, "Split RNG seed");
    cmd_fit->add_option("--shrinkage", fitc.shrinkage, "relative:EPS or fixed:LAMBDA");

    RankOptions rank;
    CLI::App* cmd_rank = app.add_subcommand("rank-electrodes", "Brute-force electrode subset ranking");
    cmd_rank->add_option("--input", rank.input, "Session file")->required();
    cmd_rank->add_option("--output", rank.output, "Output CSV path");
    cmd_rank->add_option("--keep", rank.keep, "Electrodes to keep per subset")->required();
    cmd_rank->add_option("--electrodes", rank.electrodes, "Electrode count (default: session header)");
    cmd_rank->add_option("--n-values", rank.n_values, "Cycle counts to validate at");
    cmd_rank->add_option("--n-train", rank.n_train, "Training symbols per repetition");
    cmd_rank->add_option("--n-reps", rank.n_reps, "Number of repetitions");
    cmd_rank->add_option("--seed", rank.seed, "Split RNG seed");
    cmd_rank->add_option("--shrinkage", rank.shrinkage, "relative:EPS or fixed:LAMBDA");

    ProxyOptions proxy;
    CLI::App* cmd_proxy = app.add_subcommand("proxies", "Compare SNR and proxy predictors across sessions");
    cmd_proxy->add_option("--input", proxy.inputs, "Session files (at least 3)")->required();
    cmd_proxy->add_option("--output", proxy.output, "Output CSV path");
    cmd_proxy->add_option("--fixed-n", proxy.fixed_n, "Cycle count for the accuracy column");
    cmd_proxy->add_option("--n-train", proxy.n_train, "Training symbols per repetition");
    cmd_proxy->add_option("--n-reps", proxy.n_reps, "Number of repetitions");
    cmd_proxy->add_option("--seed", proxy.seed, "Split RNG seed");
    cmd_proxy->add_option("--shrinkage", proxy.shrinkage, "relative:EPS or fixed:LAMBDA");

    std::string erp_input;
    std::string erp_output = "erp.csv";
    CLI::App* cmd_erp = app.add_subcommand("erp", "Export class-mean ERPs (CSV: class,index,value)");
    cmd_erp->add_option("--input", erp_input, "Session file")->required();
    cmd_erp->add_option("--output", erp_output, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_table->parsed()) return run_accuracy_table(table);
        if (cmd_sim->parsed()) return run_simulate(sim);
        if (cmd_fit->parsed()) return run_fit_curve(fitc);
        if (cmd_rank->parsed()) return run_rank_electrodes(rank);
        if (cmd_proxy->parsed()) return run_proxies(proxy);
        if (cmd_erp->parsed()) return run_erp(erp_input, erp_output);
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
