#include "p300snr/session_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "p300snr/errors.hpp"

namespace p300snr {

namespace {
using nlohmann::json;
}

void write_session(const SessionData& session, const std::string& path, const SessionFileInfo& info) {
    json j;
    j["format"] = "p300snr-session";
    j["version"] = 1;
    j["geometry"] = {{"rows", session.config.geometry.n_rows}, {"cols", session.config.geometry.n_cols}};
    j["cycles_per_symbol"] = session.config.cycles_per_symbol;
    j["rng_seed"] = session.config.rng_seed;
    j["feature_dim"] = session.trials.empty() ? 0 : session.trials.front().features.size();
    j["electrode_count"] = info.electrode_count;
    j["samples_per_electrode"] = info.samples_per_electrode;
    json symbols = json::array();
    for (const auto& [row, col] : session.config.symbols) symbols.push_back({row, col});
    j["symbols"] = std::move(symbols);
    json trials = json::array();
    for (const Trial& t : session.trials) {
        trials.push_back({{"symbol", t.symbol_index},
                          {"cycle", t.cycle_index},
                          {"stimulus", t.stimulus_id},
                          {"label", t.label},
                          {"features", t.features}});
    }
    j["trials"] = std::move(trials);

    std::ofstream out(path);
    if (!out) throw data_error("write_session: cannot open " + path + " for writing");
    out << j.dump(1) << "\n";
    if (!out) throw data_error("write_session: write to " + path + " failed");
}

SessionData read_session(const std::string& path, SessionFileInfo* info) {
    std::ifstream in(path);
    if (!in) throw data_error("read_session: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw data_error("read_session: " + path + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "p300snr-session")
            throw data_error("read_session: " + path + " is not a p300snr session file");
        SessionData session;
        session.config.geometry.n_rows = j.at("geometry").at("rows").get<int>();
        session.config.geometry.n_cols = j.at("geometry").at("cols").get<int>();
        session.config.cycles_per_symbol = j.at("cycles_per_symbol").get<int>();
        session.config.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        for (const auto& pair : j.at("symbols"))
            session.config.symbols.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        const std::size_t dim = j.at("feature_dim").get<std::size_t>();
        for (const auto& jt : j.at("trials")) {
            Trial t;
            t.symbol_index = jt.at("symbol").get<int>();
            t.cycle_index = jt.at("cycle").get<int>();
            t.stimulus_id = jt.at("stimulus").get<int>();
            t.label = jt.at("label").get<int>();
            t.features = jt.at("features").get<Vector>();
            if (t.features.size() != dim)
                throw data_error("read_session: " + path + ": trial feature length disagrees with header");
            session.trials.push_back(std::move(t));
        }
        if (info) {
            info->electrode_count = j.value("electrode_count", 0);
            info->samples_per_electrode = j.value("samples_per_electrode", 0);
        }
        session.config.validate();
        return session;
    } catch (const json::exception& e) {
        throw data_error("read_session: " + path + ": malformed session (" + e.what() + ")");
    }
}

void write_erp_csv(const SessionData& session, const std::string& path) {
    if (session.trials.empty()) throw data_error("write_erp_csv: session has no trials");
    const std::size_t d = session.trials.front().features.size();
    Vector target(d, 0.0);
    Vector nontarget(d, 0.0);
    std::size_t n_target = 0;
    std::size_t n_nontarget = 0;
    for (const Trial& t : session.trials) {
        if (t.features.size() != d) throw data_error("write_erp_csv: mismatched feature dimensions");
        Vector& acc = t.label ? target : nontarget;
        (t.label ? n_target : n_nontarget)++;
        for (std::size_t i = 0; i < d; ++i) acc[i] += t.features[i];
    }
    if (n_target == 0 || n_nontarget == 0) throw data_error("write_erp_csv: need trials of both classes");

    std::ofstream out(path);
    if (!out) throw data_error("write_erp_csv: cannot open " + path);
    out << "class,index,value\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < d; ++i) out << "target," << i << ',' << target[i] / n_target << '\n';
    for (std::size_t i = 0; i < d; ++i) out << "nontarget," << i << ',' << nontarget[i] / n_nontarget << '\n';
}

}  // namespace p300snr
