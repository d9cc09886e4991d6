#include "bivruin/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bivruin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) fail(where, "unknown key '" + item.key() + "'");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) fail(where, "missing key '" + key + "'");
    if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(where + "." + key, "expected a number");
    return obj[key].get<double>();
}

ClaimDistribution parse_distribution(const json& obj, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected a distribution object");
    if (!obj.contains("type") || !obj["type"].is_string()) {
        fail(where, "distribution needs a string 'type'");
    }
    const std::string type = obj["type"].get<std::string>();
    try {
        if (type == "deterministic") {
            check_keys(obj, where, {"type", "value"});
            return ClaimDistribution::deterministic(get_number(obj, where, "value"));
        }
        if (type == "exponential") {
            check_keys(obj, where, {"type", "rate"});
            return ClaimDistribution::exponential(get_number(obj, where, "rate"));
        }
        if (type == "erlang") {
            check_keys(obj, where, {"type", "shape", "rate"});
            const double shape = get_number(obj, where, "shape");
            if (shape != std::floor(shape)) fail(where + ".shape", "expected an integer");
            return ClaimDistribution::erlang(static_cast<int>(shape),
                                             get_number(obj, where, "rate"));
        }
        if (type == "mixture") {
            check_keys(obj, where, {"type", "components"});
            if (!obj.contains("components") || !obj["components"].is_array()) {
                fail(where, "mixture needs a 'components' array");
            }
            std::vector<ClaimDistribution::Weighted> parts;
            std::size_t idx = 0;
            for (const auto& comp : obj["components"]) {
                const std::string cw = where + ".components[" + std::to_string(idx++) + "]";
                check_keys(comp, cw, {"weight", "dist"});
                if (!comp.contains("dist")) fail(cw, "missing key 'dist'");
                parts.push_back(
                    {get_number(comp, cw, "weight"), parse_distribution(comp["dist"], cw)});
            }
            return ClaimDistribution::mixture(std::move(parts));
        }
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    fail(where + ".type", "unknown distribution type '" + type + "'");
}

RiskProcess parse_line(const json& obj, const std::string& where) {
    check_keys(obj, where, {"premium_rate", "claim_rate", "claims"});
    RiskProcess line;
    line.premium_rate = get_number(obj, where, "premium_rate");
    line.claim_rate = get_number_or(obj, where, "claim_rate", 0.0);
    if (obj.contains("claims") && !obj["claims"].is_null()) {
        line.claims = parse_distribution(obj["claims"], where + ".claims");
    }
    try {
        line.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return line;
}

TransferCost parse_cost(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) fail(where, "missing key '" + key + "'");
    const json& value = obj[key];
    if (value.is_string()) {
        if (value.get<std::string>() == "inf") return TransferCost::disabled();
        fail(where + "." + key, "expected a number or \"inf\"");
    }
    if (!value.is_number()) fail(where + "." + key, "expected a number or \"inf\"");
    try {
        return TransferCost::finite(value.get<double>());
    } catch (const std::invalid_argument& e) {
        fail(where + "." + key, e.what());
    }
}

CommonStream parse_joint(const json& obj, const std::string& where) {
    check_keys(obj, where, {"rate", "atoms"});
    const double rate = get_number(obj, where, "rate");
    if (!obj.contains("atoms") || !obj["atoms"].is_array() || obj["atoms"].empty()) {
        fail(where, "joint stream needs a nonempty 'atoms' array");
    }
    std::vector<JointAtom> atoms;
    std::size_t idx = 0;
    for (const auto& entry : obj["atoms"]) {
        const std::string aw = where + ".atoms[" + std::to_string(idx++) + "]";
        check_keys(entry, aw, {"weight", "law1", "law2"});
        JointAtom atom;
        atom.weight = get_number(entry, aw, "weight");
        if (entry.contains("law1") && !entry["law1"].is_null()) {
            atom.law1 = parse_distribution(entry["law1"], aw + ".law1");
        }
        if (entry.contains("law2") && !entry["law2"].is_null()) {
            atom.law2 = parse_distribution(entry["law2"], aw + ".law2");
        }
        atoms.push_back(std::move(atom));
    }
    try {
        return CommonStream{rate, JointClaimDistribution(std::move(atoms))};
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
}

std::vector<double> parse_grid(const json& value, const std::string& where) {
    std::vector<double> out;
    if (value.is_array()) {
        for (const auto& v : value) {
            if (!v.is_number()) fail(where, "expected numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (value.is_object()) {
        check_keys(value, where, {"from", "to", "count"});
        const double from = get_number(value, where, "from");
        const double to = get_number(value, where, "to");
        const double count_raw = get_number(value, where, "count");
        if (count_raw < 1 || count_raw != std::floor(count_raw)) {
            fail(where + ".count", "expected a positive integer");
        }
        const int count = static_cast<int>(count_raw);
        for (int i = 0; i < count; ++i) {
            out.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
        }
        return out;
    }
    fail(where, "expected an array or {from,to,count}");
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    check_keys(root, origin, {"model", "sim", "wh", "sweep", "output"});
    if (!root.contains("model")) fail(origin, "missing key 'model'");

    ExperimentConfig cfg;
    {
        std::ostringstream hash;
        hash << std::hex << fnv1a64(text);
        cfg.config_hash = hash.str();
    }

    const json& model = root["model"];
    const std::string mw = origin + ".model";
    check_keys(model, mw, {"line1", "line2", "r1", "r2", "joint", "allow_low_cost"});
    if (!model.contains("line1") || !model.contains("line2")) {
        fail(mw, "needs 'line1' and 'line2'");
    }
    cfg.model.line1 = parse_line(model["line1"], mw + ".line1");
    cfg.model.line2 = parse_line(model["line2"], mw + ".line2");
    cfg.model.r1 = parse_cost(model, mw, "r1");
    cfg.model.r2 = parse_cost(model, mw, "r2");
    if (model.contains("joint") && !model["joint"].is_null()) {
        cfg.model.joint = parse_joint(model["joint"], mw + ".joint");
    }
    if (model.contains("allow_low_cost")) {
        if (!model["allow_low_cost"].is_boolean()) fail(mw + ".allow_low_cost", "expected a bool");
        cfg.model.allow_low_cost = model["allow_low_cost"].get<bool>();
    }
    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        fail(mw, e.what());
    }

    if (root.contains("sim")) {
        const json& sim = root["sim"];
        const std::string sw = origin + ".sim";
        check_keys(sim, sw, {"seed", "n_paths", "t_max", "workers", "record_transfers"});
        cfg.sim.seed = static_cast<std::uint64_t>(get_number_or(sim, sw, "seed", 42.0));
        const double n = get_number_or(sim, sw, "n_paths", 10000.0);
        if (n < 1) fail(sw + ".n_paths", "must be at least one");
        cfg.sim.n_paths = static_cast<std::uint64_t>(n);
        cfg.sim.t_max = get_number_or(sim, sw, "t_max", 2000.0);
        if (!(cfg.sim.t_max > 0.0)) fail(sw + ".t_max", "must be positive");
        cfg.sim.workers = static_cast<int>(get_number_or(sim, sw, "workers", 0.0));
        if (sim.contains("record_transfers")) {
            if (!sim["record_transfers"].is_boolean()) {
                fail(sw + ".record_transfers", "expected a bool");
            }
            cfg.sim.record_transfers = sim["record_transfers"].get<bool>();
        }
    }

    if (root.contains("wh")) {
        const json& wh = root["wh"];
        const std::string ww = origin + ".wh";
        check_keys(wh, ww, {"n_samples", "rejection_factor", "w_max", "w_count"});
        const double n = get_number_or(wh, ww, "n_samples", 10000.0);
        if (n < 1) fail(ww + ".n_samples", "must be at least one");
        cfg.wh.n_samples = static_cast<std::size_t>(n);
        cfg.wh.rejection_factor = get_number_or(wh, ww, "rejection_factor", 1e4);
        if (!(cfg.wh.rejection_factor > 0.0)) fail(ww + ".rejection_factor", "must be positive");
        cfg.wh.w_max = get_number_or(wh, ww, "w_max", 5.0);
        if (!(cfg.wh.w_max > 0.0)) fail(ww + ".w_max", "must be positive");
        cfg.wh.w_count = static_cast<int>(get_number_or(wh, ww, "w_count", 51.0));
        if (cfg.wh.w_count < 2) fail(ww + ".w_count", "must be at least two");
    }

    if (root.contains("sweep")) {
        const json& sweep = root["sweep"];
        const std::string pw = origin + ".sweep";
        check_keys(sweep, pw, {"s1", "s2", "points", "overlay"});
        if (sweep.contains("s1")) cfg.sweep.s1 = parse_grid(sweep["s1"], pw + ".s1");
        if (sweep.contains("s2")) cfg.sweep.s2 = parse_grid(sweep["s2"], pw + ".s2");
        if (sweep.contains("points")) {
            if (!sweep["points"].is_array()) fail(pw + ".points", "expected an array");
            for (const auto& pt : sweep["points"]) {
                if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
                    !pt[1].is_number()) {
                    fail(pw + ".points", "each point must be [u, v]");
                }
                cfg.sweep.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
            }
        }
        if (sweep.contains("overlay")) {
            if (!sweep["overlay"].is_boolean()) fail(pw + ".overlay", "expected a bool");
            cfg.sweep.overlay = sweep["overlay"].get<bool>();
        }
    }

    if (root.contains("output")) {
        const json& output = root["output"];
        const std::string ow = origin + ".output";
        check_keys(output, ow, {"dir", "formats"});
        if (output.contains("dir")) {
            if (!output["dir"].is_string()) fail(ow + ".dir", "expected a string");
            cfg.output.dir = output["dir"].get<std::string>();
        }
        if (output.contains("formats")) {
            if (!output["formats"].is_array()) fail(ow + ".formats", "expected an array");
            cfg.output.formats.clear();
            for (const auto& f : output["formats"]) {
                if (!f.is_string() || f.get<std::string>() != "csv") {
                    fail(ow + ".formats", "only \"csv\" is supported");
                }
                cfg.output.formats.push_back(f.get<std::string>());
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

}  // namespace bivruin
